//! Experiment scripts shipped with the binary.

use crate::error::{Error, Result};
use crate::sim::ScenarioScript;

pub const BUNDLED: &[(&str, &str)] = &[
    ("experiment1", include_str!("../scenarios/experiment1.json")),
    ("experiment2", include_str!("../scenarios/experiment2.json")),
    ("experiment3", include_str!("../scenarios/experiment3.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<ScenarioScript> {
    let text = source(name).ok_or_else(|| Error::InvalidScenario(format!("no bundled scenario `{name}`")))?;
    ScenarioScript::from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scripts_validate() {
        for name in names() {
            let s = load(name).unwrap();
            assert_eq!(s.name.as_deref(), Some(name));
            assert_eq!(s.vocabulary().unwrap().dim(), 10);
        }
        assert!(load("experiment9").is_err());
    }
}
