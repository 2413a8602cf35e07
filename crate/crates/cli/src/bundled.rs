//! Golden scenarios shipped inside the binary.

pub const SCENARIOS: &[(&str, &str)] = &[
    ("r2_symplectic", include_str!("../scenarios/r2_symplectic.json")),
    ("r3_twist_basic", include_str!("../scenarios/r3_twist_basic.json")),
    ("r4_twisted_graph", include_str!("../scenarios/r4_twisted_graph.json")),
    ("r4_dirac_action", include_str!("../scenarios/r4_dirac_action.json")),
    (
        "sl2_hemisemidirect",
        include_str!("../scenarios/sl2_hemisemidirect.json"),
    ),
    (
        "r2_translation_moment",
        include_str!("../scenarios/r2_translation_moment.json"),
    ),
    ("r2_affine_moment", include_str!("../scenarios/r2_affine_moment.json")),
];

pub fn find(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    SCENARIOS.iter().map(|(n, _)| *n)
}
