#![allow(dead_code)]

use grocery_memory::{scenarios, NoiseProfile, ScenarioScript};

/// Bundled household with noise disabled and no scripted events.
pub fn quiet_household(name: &str) -> ScenarioScript {
    let mut s = scenarios::load(name).unwrap();
    s.noise = NoiseProfile::noise_free();
    s.events.clear();
    s.storage_visits.clear();
    s.reset_days.clear();
    s.default_visit_plan = Some(vec!["kitchen".into(), "home_office".into(), "dining_area".into()]);
    s
}
