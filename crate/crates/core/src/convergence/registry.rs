use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremInfo {
    pub id: &'static str,
    pub group: &'static str,
    pub summary: &'static str,
}

const fn t(id: &'static str, group: &'static str, summary: &'static str) -> TheoremInfo {
    TheoremInfo { id, group, summary }
}

pub const REGISTRY: [TheoremInfo; 15] = [
    t("yo2sc", "yosida", "Yosida-regularised linear equation converges in H_2 as lambda -> 0"),
    t("yopsc", "yosida", "Yosida-regularised linear equation with additive noise converges in H_p"),
    t("nyo2sc", "resolvent", "linear equation with A_n -> A in strong resolvent sense, H_2"),
    t("nyotta", "resolvent", "linear equation with A_n -> A in strong resolvent sense, H_p"),
    t("trippona", "poisson", "Poisson-measure convolution with A_n -> A converges in H_p"),
    t("trippona_lambda", "poisson", "Poisson-measure convolution under Yosida regularisation, H_p"),
    t("nyo2", "semilinear", "semilinear martingale equation under joint perturbation, H_2"),
    t("nyop", "semilinear", "semilinear Poisson-measure equation under joint perturbation, H_p"),
    t("additive_p", "additive", "semilinear equation with additive martingale noise, H_p"),
    t("titikaka", "deterministic", "deterministic Trotter-Kato approximation in sup norm"),
    t("cor_utile", "corollary", "explicit sqrt(lambda) bound for Yosida approximations with smooth data"),
    t("lemma_uno", "lemma", "initial-datum term: |S_n u_0n - S u_0| in H_p"),
    t("lemma_due", "lemma", "drift convolution estimate delta + gamma int |u_n - u|^p"),
    t("lemma_tre", "lemma", "martingale convolution estimate in H_2"),
    t("lemma_treppe", "lemma", "Poisson-measure convolution estimate in H_p"),
];

pub fn lookup(id: &str) -> Option<&'static TheoremInfo> {
    REGISTRY.iter().find(|t| t.id == id)
}

/// Entries whose id contains `filter` or whose group equals it.
pub fn list(filter: Option<&str>) -> Vec<&'static TheoremInfo> {
    REGISTRY
        .iter()
        .filter(|t| filter.is_none_or(|f| t.id.contains(f) || t.group == f))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_filters() {
        assert_eq!(list(None).len(), 15);
        let ids: Vec<_> = list(Some("yosida")).iter().map(|t| t.id).collect();
        assert_eq!(ids, ["yo2sc", "yopsc"]);
        assert!(list(Some("no-such-theorem")).is_empty());
        assert_eq!(list(Some("lemma")).len(), 4);
        assert!(lookup("nyop").is_some());
    }
}
