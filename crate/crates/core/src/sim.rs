//! Discrete-event household simulation.
//!
//! A day proceeds as: optional list reset, scripted events in file order,
//! scheduled context visits, then any scripted storage visit. After every
//! `windowDays` days the short-term window is drained into a [`MissingReport`].

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perception::{Detection, NoiseProfile, Perception, PerceptionConfig};
use crate::persistence::{RngState, StateSnapshot, FORMAT_VERSION};
use crate::reasoner::{self, MissingList, MissingReport, DEFAULT_PRESENCE_THETA};
use crate::stcm::{StcmBuffer, DEFAULT_WINDOW_DAYS};
use crate::sustain::{SustainNetwork, SustainParams};
use crate::vocab::{encode, LatentVariable, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemSpec {
    pub id: String,
    pub category: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ContextSpec {
    #[serde(default)]
    pub is_storage: bool,
    #[serde(default)]
    pub items: Vec<ItemSpec>,
}

/// Contexts with the object instances currently placed in them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    contexts: BTreeMap<String, ContextSpec>,
    /// Category of every instance ever placed, so removed items can be replaced.
    catalog: BTreeMap<String, String>,
}

impl Environment {
    pub fn new(contexts: &BTreeMap<String, ContextSpec>) -> Result<Self> {
        let mut catalog = BTreeMap::new();
        for (name, ctx) in contexts {
            if name.is_empty() {
                return Err(Error::InvalidScenario("empty context name".into()));
            }
            for item in &ctx.items {
                if catalog.insert(item.id.clone(), item.category.clone()).is_some() {
                    return Err(Error::InvalidScenario(format!("duplicate instance id `{}`", item.id)));
                }
            }
        }
        Ok(Self {
            contexts: contexts.clone(),
            catalog,
        })
    }

    pub fn contexts(&self) -> &BTreeMap<String, ContextSpec> {
        &self.contexts
    }

    pub fn context(&self, name: &str) -> Result<&ContextSpec> {
        self.contexts
            .get(name)
            .ok_or_else(|| Error::UnknownContext(name.to_owned()))
    }

    pub fn items(&self, context: &str) -> Result<&[ItemSpec]> {
        Ok(&self.context(context)?.items)
    }

    pub fn is_storage(&self, context: &str) -> Result<bool> {
        Ok(self.context(context)?.is_storage)
    }

    pub fn storage_contexts(&self) -> impl Iterator<Item = &str> {
        self.contexts
            .iter()
            .filter(|(_, c)| c.is_storage)
            .map(|(n, _)| n.as_str())
    }

    pub fn regular_contexts(&self) -> impl Iterator<Item = &str> {
        self.contexts
            .iter()
            .filter(|(_, c)| !c.is_storage)
            .map(|(n, _)| n.as_str())
    }

    /// Context currently holding `instance_id`, if any.
    pub fn locate(&self, instance_id: &str) -> Option<&str> {
        self.contexts
            .iter()
            .find(|(_, c)| c.items.iter().any(|i| i.id == instance_id))
            .map(|(n, _)| n.as_str())
    }

    fn take(&mut self, instance_id: &str) -> Result<ItemSpec> {
        for ctx in self.contexts.values_mut() {
            if let Some(pos) = ctx.items.iter().position(|i| i.id == instance_id) {
                return Ok(ctx.items.remove(pos));
            }
        }
        Err(Error::UnknownInstance(instance_id.to_owned()))
    }

    fn place(&mut self, item: ItemSpec, context: &str) -> Result<()> {
        self.contexts
            .get_mut(context)
            .ok_or_else(|| Error::UnknownContext(context.to_owned()))?
            .items
            .push(item);
        Ok(())
    }

    pub fn apply_event(&mut self, event: &ScenarioEvent) -> Result<()> {
        let id = event.instance_id.as_str();
        match &event.action {
            EventAction::Remove => {
                self.take(id)?;
            }
            EventAction::Move { target_context } => {
                self.context(target_context)?;
                let item = self.take(id)?;
                self.place(item, target_context)?;
            }
            EventAction::Replace { target_context } => {
                self.context(target_context)?;
                if self.locate(id).is_some() {
                    return Err(Error::InstanceAlreadyPresent(id.to_owned()));
                }
                let category = self
                    .catalog
                    .get(id)
                    .ok_or_else(|| Error::UnknownInstance(id.to_owned()))?
                    .clone();
                self.place(
                    ItemSpec {
                        id: id.to_owned(),
                        category,
                    },
                    target_context,
                )?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "lowercase")]
pub enum EventAction {
    Remove,
    Move {
        #[serde(rename = "targetContext")]
        target_context: String,
    },
    Replace {
        #[serde(rename = "targetContext")]
        target_context: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioEvent {
    #[serde(default)]
    pub day: u32,
    #[serde(flatten)]
    pub action: EventAction,
    pub instance_id: String,
}

impl ScenarioEvent {
    pub fn remove(day: u32, instance_id: &str) -> Self {
        Self {
            day,
            action: EventAction::Remove,
            instance_id: instance_id.to_owned(),
        }
    }

    pub fn moved(day: u32, instance_id: &str, target: &str) -> Self {
        Self {
            day,
            action: EventAction::Move {
                target_context: target.to_owned(),
            },
            instance_id: instance_id.to_owned(),
        }
    }

    pub fn replace(day: u32, instance_id: &str, target: &str) -> Self {
        Self {
            day,
            action: EventAction::Replace {
                target_context: target.to_owned(),
            },
            instance_id: instance_id.to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct TrainingConfig {
    /// Teaching observations collected per context before learning.
    pub exemplars_per_context: u32,
    /// Teach through the noisy channel instead of a clean one.
    pub noisy: bool,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            exemplars_per_context: 3,
            noisy: false,
        }
    }
}

fn default_visits_per_day() -> u32 {
    3
}

fn default_window_days() -> u32 {
    DEFAULT_WINDOW_DAYS
}

fn default_presence_theta() -> f64 {
    DEFAULT_PRESENCE_THETA
}

/// A scripted experiment. Days are zero-based indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioScript {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub duration_days: u32,
    #[serde(default = "default_visits_per_day")]
    pub visits_per_day: u32,
    #[serde(default = "default_window_days")]
    pub window_days: u32,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default)]
    pub noise: NoiseProfile,
    #[serde(default)]
    pub perception: PerceptionConfig,
    #[serde(default)]
    pub sustain: SustainParams,
    #[serde(default = "default_presence_theta")]
    pub presence_theta: f64,
    #[serde(default)]
    pub training: TrainingConfig,
    /// Defaults to every category found in `contexts`, in context order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<Vocabulary>,
    pub contexts: BTreeMap<String, ContextSpec>,
    #[serde(default)]
    pub events: Vec<ScenarioEvent>,
    /// Explicit visit lists for particular days.
    #[serde(default)]
    pub visit_plan: BTreeMap<u32, Vec<String>>,
    /// Visit list for days absent from `visit_plan`; random visits when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_visit_plan: Option<Vec<String>>,
    #[serde(default)]
    pub storage_visits: Vec<u32>,
    /// Days at whose start the user clears the missing list.
    #[serde(default)]
    pub reset_days: Vec<u32>,
    /// Grocery list the user compares against at the end of the run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user_list: Option<Vec<String>>,
}

impl ScenarioScript {
    pub fn from_json(text: &str) -> Result<Self> {
        let script: Self = serde_json::from_str(text).map_err(|e| Error::parse("scenario", e))?;
        script.validate()?;
        Ok(script)
    }

    pub fn vocabulary(&self) -> Result<Vocabulary> {
        if let Some(v) = &self.vocabulary {
            return Ok(v.clone());
        }
        let mut labels: Vec<String> = Vec::new();
        for ctx in self.contexts.values() {
            for item in &ctx.items {
                if !labels.contains(&item.category) {
                    labels.push(item.category.clone());
                }
            }
        }
        Vocabulary::new(labels)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.duration_days == 0 {
            return bad("durationDays must be positive".into());
        }
        if self.visits_per_day == 0 {
            return bad("visitsPerDay must be at least 1".into());
        }
        if self.window_days == 0 {
            return bad("windowDays must be positive".into());
        }
        if self.training.exemplars_per_context == 0 {
            return bad("training.exemplarsPerContext must be positive".into());
        }
        self.noise.validate()?;
        self.sustain.validate()?;
        if self.presence_theta.is_nan() || self.presence_theta < 0.0 {
            return bad("presenceTheta must be >= 0".into());
        }
        let env = Environment::new(&self.contexts)?;
        let vocab = self.vocabulary()?;
        for ctx in self.contexts.values() {
            for item in &ctx.items {
                if !vocab.contains(&item.category) {
                    return bad(format!("category `{}` missing from vocabulary", item.category));
                }
            }
        }
        if env.regular_contexts().next().is_none() {
            return bad("at least one non-storage context is required".into());
        }
        if self.events.windows(2).any(|w| w[0].day > w[1].day) {
            return bad("events must be sorted by day".into());
        }
        for e in &self.events {
            if let EventAction::Move { target_context } | EventAction::Replace { target_context } = &e.action {
                if !self.contexts.contains_key(target_context) {
                    return bad(format!("event targets unknown context `{target_context}`"));
                }
            }
        }
        let plans = self.visit_plan.values().chain(self.default_visit_plan.iter());
        for plan in plans {
            for ctx in plan {
                if !self.contexts.contains_key(ctx) {
                    return bad(format!("visit plan names unknown context `{ctx}`"));
                }
            }
        }
        if !self.storage_visits.is_empty() && env.storage_contexts().next().is_none() {
            return bad("storageVisits given but no storage context exists".into());
        }
        if let Some(list) = &self.user_list {
            if let Some(item) = list.iter().find(|i| !vocab.contains(i)) {
                return bad(format!("user list item `{item}` is not in the vocabulary"));
            }
        }
        Ok(())
    }

    pub fn environment(&self) -> Result<Environment> {
        Environment::new(&self.contexts)
    }

    pub fn perception(&self) -> Result<Perception> {
        Perception::build(self.vocabulary()?, &self.perception)
    }

    pub fn storage_visit_on(&self, day: u32) -> bool {
        self.storage_visits.contains(&day)
    }

    pub fn reset_on(&self, day: u32) -> bool {
        self.reset_days.contains(&day)
    }

    pub fn events_on(&self, day: u32) -> impl Iterator<Item = &ScenarioEvent> {
        self.events.iter().filter(move |e| e.day == day)
    }

    pub fn closes_window(&self, day: u32) -> bool {
        (day + 1).is_multiple_of(self.window_days)
    }
}

/// Contexts to visit on `day`: the scripted plan when there is one, otherwise
/// `visitsPerDay` uniform draws, with replacement, from the non-storage contexts.
pub fn schedule_day<R: Rng + ?Sized>(script: &ScenarioScript, day: u32, rng: &mut R) -> Result<Vec<String>> {
    if let Some(plan) = script.visit_plan.get(&day).or(script.default_visit_plan.as_ref()) {
        return Ok(plan.clone());
    }
    let regular: Vec<&String> = script
        .contexts
        .iter()
        .filter(|(_, c)| !c.is_storage)
        .map(|(n, _)| n)
        .collect();
    if regular.is_empty() {
        return Err(Error::InvalidScenario("no non-storage context to visit".into()));
    }
    Ok((0..script.visits_per_day)
        .map(|_| regular[rng.random_range(0..regular.len())].clone())
        .collect())
}

/// What a single visit produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VisitOutcome {
    pub context: String,
    pub day: u32,
    pub storage: bool,
    pub detections: Vec<String>,
    pub observation: LatentVariable,
}

/// Live state of one robot in one household.
#[derive(Debug, Clone)]
pub struct Simulation {
    perception: Perception,
    env: Environment,
    net: SustainNetwork,
    stcm: StcmBuffer,
    missing: MissingList,
    noise: NoiseProfile,
    presence_theta: f64,
    storage_observed: BTreeSet<String>,
    rng: ChaCha8Rng,
    schedule_rng: ChaCha8Rng,
    day_cursor: u32,
    current_context: Option<String>,
    latest_detections: Vec<Detection>,
    last_report: Option<MissingReport>,
}

pub(crate) fn seeded_streams(seed: u64) -> RngState {
    let perception = ChaCha8Rng::seed_from_u64(seed);
    let mut schedule = ChaCha8Rng::seed_from_u64(seed);
    schedule.set_stream(1);
    RngState { perception, schedule }
}

impl Simulation {
    pub fn new(
        perception: Perception,
        env: Environment,
        net: SustainNetwork,
        noise: NoiseProfile,
        window_days: u32,
        presence_theta: f64,
        seed: u64,
    ) -> Result<Self> {
        if net.dim() != perception.vocab.dim() {
            return Err(Error::DimensionMismatch {
                expected: perception.vocab.dim(),
                actual: net.dim(),
            });
        }
        noise.validate()?;
        let streams = seeded_streams(seed);
        Ok(Self {
            perception,
            env,
            net,
            stcm: StcmBuffer::new(window_days)?,
            missing: MissingList::new(),
            noise,
            presence_theta,
            storage_observed: BTreeSet::new(),
            rng: streams.perception,
            schedule_rng: streams.schedule,
            day_cursor: 0,
            current_context: None,
            latest_detections: Vec::new(),
            last_report: None,
        })
    }

    /// A simulation for `script` around an already trained network.
    pub fn for_script(script: &ScenarioScript, perception: Perception, net: SustainNetwork, seed: u64) -> Result<Self> {
        Self::new(
            perception,
            script.environment()?,
            net,
            script.noise.clone(),
            script.window_days,
            script.presence_theta,
            seed,
        )
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.perception.vocab
    }

    pub fn perception(&self) -> &Perception {
        &self.perception
    }

    pub fn environment(&self) -> &Environment {
        &self.env
    }

    pub fn network(&self) -> &SustainNetwork {
        &self.net
    }

    pub fn network_mut(&mut self) -> &mut SustainNetwork {
        &mut self.net
    }

    pub fn stcm(&self) -> &StcmBuffer {
        &self.stcm
    }

    pub fn missing(&self) -> &MissingList {
        &self.missing
    }

    pub fn noise(&self) -> &NoiseProfile {
        &self.noise
    }

    pub fn day_cursor(&self) -> u32 {
        self.day_cursor
    }

    pub fn current_context(&self) -> Option<&str> {
        self.current_context.as_deref()
    }

    pub fn latest_detections(&self) -> &[Detection] {
        &self.latest_detections
    }

    pub fn last_report(&self) -> Option<&MissingReport> {
        self.last_report.as_ref()
    }

    pub fn storage_observed(&self) -> &BTreeSet<String> {
        &self.storage_observed
    }

    pub fn apply_event(&mut self, event: &ScenarioEvent) -> Result<()> {
        self.env.apply_event(event)
    }

    /// Senses `context` and encodes the result without storing it anywhere.
    pub fn observe(&mut self, context: &str, day: u32, noisy: bool) -> Result<(Vec<Detection>, LatentVariable)> {
        let clean = NoiseProfile::noise_free();
        let noise = if noisy { &self.noise } else { &clean };
        let detections = self
            .perception
            .sense_context(&self.env, context, noise, &mut self.rng)?;
        let labels: Vec<&str> = detections.iter().map(|d| d.predicted_label.as_str()).collect();
        let lv = encode(&labels, &self.perception.vocab, day, Some(context)).lv;
        self.current_context = Some(context.to_owned());
        self.latest_detections = detections.clone();
        Ok((detections, lv))
    }

    /// One visit: sense, encode, and route the observation to the short-term
    /// window (regular contexts) or to the window's storage set.
    pub fn visit(&mut self, context: &str, day: u32) -> Result<VisitOutcome> {
        let storage = self.env.is_storage(context)?;
        if !self.stcm.contains_day(day) {
            return Err(Error::DayOutsideWindow {
                day,
                start: self.stcm.window_start_day(),
                end: self.stcm.window_last_day(),
            });
        }
        let (detections, lv) = self.observe(context, day, true)?;
        if storage {
            let seen = self.perception.vocab.labels_at(lv.present());
            self.storage_observed.extend(seen);
        } else {
            self.stcm.store(lv.clone())?;
        }
        self.day_cursor = day;
        Ok(VisitOutcome {
            context: context.to_owned(),
            day,
            storage,
            detections: detections.into_iter().map(|d| d.predicted_label).collect(),
            observation: lv,
        })
    }

    /// Closes the current window and updates the missing list.
    pub fn report(&mut self) -> Result<MissingReport> {
        let window_end_day = self.stcm.window_start_day() + self.stcm.window_days();
        let window = self.stcm.entries().to_vec();
        let report = reasoner::process_window(
            &window,
            &self.storage_observed,
            &self.net,
            &self.perception.vocab,
            self.presence_theta,
            window_end_day,
            &mut self.missing,
        )?;
        self.stcm.drain_window();
        self.storage_observed.clear();
        self.day_cursor = self.stcm.window_start_day();
        self.last_report = Some(report.clone());
        Ok(report)
    }

    pub fn reset_missing(&mut self) {
        self.missing.reset();
    }

    pub fn grocery_diff(&self, user_list: &BTreeSet<String>) -> BTreeSet<String> {
        self.missing.diff_with_user_list(user_list)
    }

    pub fn schedule_day(&mut self, script: &ScenarioScript, day: u32) -> Result<Vec<String>> {
        schedule_day(script, day, &mut self.schedule_rng)
    }

    pub fn snapshot(&self) -> StateSnapshot {
        StateSnapshot {
            format_version: FORMAT_VERSION,
            vocabulary: self.perception.vocab.clone(),
            network: self.net.clone(),
            stcm: self.stcm.clone(),
            missing_list: self.missing.clone(),
            day_cursor: self.day_cursor,
            rng_state: RngState {
                perception: self.rng.clone(),
                schedule: self.schedule_rng.clone(),
            },
        }
    }

    /// Restores memory, cursor and generator state from a snapshot.
    pub fn restore(&mut self, snapshot: StateSnapshot) -> Result<()> {
        if snapshot.vocabulary != self.perception.vocab {
            return Err(Error::Inconsistent(
                "snapshot vocabulary differs from the session's".into(),
            ));
        }
        snapshot.validate()?;
        self.net = snapshot.network;
        self.stcm = snapshot.stcm;
        self.missing = snapshot.missing_list;
        self.day_cursor = snapshot.day_cursor;
        self.rng = snapshot.rng_state.perception;
        self.schedule_rng = snapshot.rng_state.schedule;
        self.storage_observed.clear();
        Ok(())
    }
}

/// Trains a fresh network by visiting every context `exemplarsPerContext` times
/// and presenting each observation with the context's name as its label.
pub fn train_network(script: &ScenarioScript, perception: &Perception, seed: u64) -> Result<SustainNetwork> {
    let env = script.environment()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let noise = if script.training.noisy {
        script.noise.clone()
    } else {
        NoiseProfile::noise_free()
    };
    let mut net = SustainNetwork::new(perception.vocab.dim(), script.sustain.clone())?;
    for _ in 0..script.training.exemplars_per_context {
        for (name, ctx) in env.contexts() {
            let detections = perception.sense_context(&env, name, &noise, &mut rng)?;
            let labels: Vec<&str> = detections.iter().map(|d| d.predicted_label.as_str()).collect();
            let lv = encode(&labels, &perception.vocab, 0, Some(name)).lv;
            net.learn_example(&lv, name, ctx.is_storage)?;
        }
    }
    Ok(net)
}

/// Runs a script against a trained network, returning one report per closed window.
pub fn run_scenario(
    script: &ScenarioScript,
    net: SustainNetwork,
    perception: Perception,
    seed: u64,
) -> Result<(Vec<MissingReport>, Simulation)> {
    script.validate()?;
    let mut sim = Simulation::for_script(script, perception, net, seed)?;
    let mut reports = Vec::new();
    for day in 0..script.duration_days {
        if script.reset_on(day) {
            sim.reset_missing();
        }
        for event in script.events_on(day) {
            sim.apply_event(event)?;
        }
        for context in sim.schedule_day(script, day)? {
            sim.visit(&context, day)?;
        }
        if script.storage_visit_on(day) {
            let storage: Vec<String> = sim.environment().storage_contexts().map(str::to_owned).collect();
            for context in storage {
                sim.visit(&context, day)?;
            }
        }
        if script.closes_window(day) {
            reports.push(sim.report()?);
        }
    }
    Ok((reports, sim))
}

/// Full result of a scripted run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioOutcome {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub seed: u64,
    pub reports: Vec<MissingReport>,
    pub final_missing_list: BTreeSet<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grocery_diff: Option<BTreeSet<String>>,
}

/// Builds perception, trains the network and runs the script end to end.
pub fn run_script(script: &ScenarioScript, seed: Option<u64>) -> Result<(ScenarioOutcome, Simulation)> {
    script.validate()?;
    let seed = seed.unwrap_or(script.rng_seed);
    let perception = script.perception()?;
    let net = train_network(script, &perception, seed)?;
    let (reports, sim) = run_scenario(script, net, perception, seed)?;
    let grocery_diff = script
        .user_list
        .as_ref()
        .map(|list| sim.grocery_diff(&list.iter().cloned().collect()));
    let outcome = ScenarioOutcome {
        scenario: script.name.clone(),
        seed,
        reports,
        final_missing_list: sim.missing().items().clone(),
        grocery_diff,
    };
    Ok((outcome, sim))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn household() -> BTreeMap<String, ContextSpec> {
        let ctx = |storage, items: &[(&str, &str)]| ContextSpec {
            is_storage: storage,
            items: items
                .iter()
                .map(|(id, c)| ItemSpec {
                    id: id.to_string(),
                    category: c.to_string(),
                })
                .collect(),
        };
        BTreeMap::from([
            (
                "kitchen".into(),
                ctx(false, &[("milk#1", "milk"), ("cereal#1", "cereal")]),
            ),
            ("dining_area".into(), ctx(false, &[])),
            ("home_office".into(), ctx(false, &[("book#1", "book")])),
            ("storage_space".into(), ctx(true, &[("cereal#2", "cereal")])),
        ])
    }

    fn script() -> ScenarioScript {
        ScenarioScript {
            name: None,
            duration_days: 6,
            visits_per_day: 3,
            window_days: 2,
            rng_seed: 1,
            noise: NoiseProfile::noise_free(),
            perception: PerceptionConfig::default(),
            sustain: SustainParams::default(),
            presence_theta: 0.5,
            training: TrainingConfig::default(),
            vocabulary: None,
            contexts: household(),
            events: vec![],
            visit_plan: BTreeMap::new(),
            default_visit_plan: None,
            storage_visits: vec![],
            reset_days: vec![],
            user_list: None,
        }
    }

    #[test]
    fn remove_move_replace() {
        let mut env = Environment::new(&household()).unwrap();
        env.apply_event(&ScenarioEvent::remove(0, "cereal#1")).unwrap();
        assert_eq!(env.locate("cereal#1"), None);
        env.apply_event(&ScenarioEvent::replace(0, "cereal#1", "kitchen"))
            .unwrap();
        assert_eq!(env.locate("cereal#1"), Some("kitchen"));
        env.apply_event(&ScenarioEvent::moved(0, "cereal#1", "dining_area"))
            .unwrap();
        assert_eq!(env.locate("cereal#1"), Some("dining_area"));
        assert!(env.items("kitchen").unwrap().iter().all(|i| i.id != "cereal#1"));
    }

    #[test]
    fn event_errors() {
        let mut env = Environment::new(&household()).unwrap();
        assert!(matches!(
            env.apply_event(&ScenarioEvent::remove(0, "ghost")),
            Err(Error::UnknownInstance(_))
        ));
        assert!(matches!(
            env.apply_event(&ScenarioEvent::moved(0, "milk#1", "attic")),
            Err(Error::UnknownContext(_))
        ));
        assert_eq!(env.locate("milk#1"), Some("kitchen"));
        assert!(matches!(
            env.apply_event(&ScenarioEvent::replace(0, "milk#1", "kitchen")),
            Err(Error::InstanceAlreadyPresent(_))
        ));
        assert!(matches!(
            env.apply_event(&ScenarioEvent::replace(0, "ghost", "kitchen")),
            Err(Error::UnknownInstance(_))
        ));
    }

    #[test]
    fn duplicate_instances_rejected() {
        let mut ctxs = household();
        ctxs.get_mut("dining_area").unwrap().items.push(ItemSpec {
            id: "milk#1".into(),
            category: "milk".into(),
        });
        assert!(Environment::new(&ctxs).is_err());
    }

    #[test]
    fn event_json_layout() {
        let e: ScenarioEvent =
            serde_json::from_str(r#"{"day":1,"action":"move","instanceId":"cereal#1","targetContext":"dining_area"}"#)
                .unwrap();
        assert_eq!(e, ScenarioEvent::moved(1, "cereal#1", "dining_area"));
        let r: ScenarioEvent = serde_json::from_str(r#"{"day":2,"action":"remove","instanceId":"milk#1"}"#).unwrap();
        assert_eq!(r, ScenarioEvent::remove(2, "milk#1"));
        assert!(serde_json::from_str::<ScenarioEvent>(r#"{"day":2,"action":"move","instanceId":"milk#1"}"#).is_err());
    }

    #[test]
    fn schedule_plans_and_random_draws() {
        let mut s = script();
        s.visit_plan
            .insert(0, vec!["kitchen".into(), "home_office".into(), "dining_area".into()]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(
            schedule_day(&s, 0, &mut rng).unwrap(),
            vec!["kitchen", "home_office", "dining_area"]
        );
        let drawn = schedule_day(&s, 1, &mut rng).unwrap();
        assert_eq!(drawn.len(), 3);
        assert!(drawn.iter().all(|c| c != "storage_space"));

        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        for day in 1..20 {
            assert_eq!(
                schedule_day(&s, day, &mut a).unwrap(),
                schedule_day(&s, day, &mut b).unwrap()
            );
        }
    }

    #[test]
    fn script_validation() {
        let mut s = script();
        s.events = vec![ScenarioEvent::remove(3, "milk#1"), ScenarioEvent::remove(1, "cereal#1")];
        assert!(s.validate().is_err());
        let mut s = script();
        s.visits_per_day = 0;
        assert!(s.validate().is_err());
        let mut s = script();
        s.default_visit_plan = Some(vec!["attic".into()]);
        assert!(s.validate().is_err());
        script().validate().unwrap();
    }

    #[test]
    fn noise_free_quiet_week_reports_nothing() {
        let mut s = script();
        s.default_visit_plan = Some(vec!["kitchen".into(), "home_office".into(), "dining_area".into()]);
        let (outcome, _) = run_script(&s, None).unwrap();
        assert_eq!(outcome.reports.len(), 3);
        for r in &outcome.reports {
            assert!(r.predicted.is_empty(), "{r:?}");
            assert!(r.missing_list.is_empty());
        }
        let ends: Vec<u32> = outcome.reports.iter().map(|r| r.window_end_day).collect();
        assert_eq!(ends, vec![2, 4, 6]);
    }

    #[test]
    fn removal_shows_up_in_next_full_window() {
        let mut s = script();
        s.default_visit_plan = Some(vec!["kitchen".into(), "home_office".into(), "dining_area".into()]);
        s.events = vec![ScenarioEvent::remove(2, "milk#1")];
        let (outcome, _) = run_script(&s, None).unwrap();
        assert!(!outcome.reports[0].predicted.contains("milk"));
        assert!(outcome.reports[1].predicted.contains("milk"));
    }

    #[test]
    fn late_removal_escapes_its_window() {
        let mut s = script();
        s.default_visit_plan = Some(vec!["kitchen".into(), "home_office".into(), "dining_area".into()]);
        s.events = vec![ScenarioEvent::remove(5, "milk#1")];
        let (outcome, _) = run_script(&s, None).unwrap();
        assert!(outcome.reports.iter().all(|r| !r.predicted.contains("milk")));
    }

    #[test]
    fn instances_are_conserved() {
        let mut s = script();
        s.events = vec![
            ScenarioEvent::moved(0, "milk#1", "dining_area"),
            ScenarioEvent::remove(1, "book#1"),
            ScenarioEvent::replace(2, "book#1", "kitchen"),
            ScenarioEvent::moved(3, "milk#1", "kitchen"),
        ];
        let mut env = s.environment().unwrap();
        for e in &s.events {
            env.apply_event(e).unwrap();
            let mut ids: Vec<&str> = env
                .contexts()
                .values()
                .flat_map(|c| c.items.iter().map(|i| i.id.as_str()))
                .collect();
            let n = ids.len();
            ids.sort();
            ids.dedup();
            assert_eq!(ids.len(), n);
        }
    }
}
