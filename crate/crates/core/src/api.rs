//! Command interface over a single simulation session.
//!
//! The HTTP service, the C bindings and the tests all drive the session through
//! [`Session::handle`], one command at a time.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::sim::{train_network, ScenarioEvent, ScenarioScript, Simulation};
use crate::sustain::SustainNetwork;
use crate::vocab::LatentVariable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verb {
    Teach,
    Learn,
    Visit,
    Event,
    Report,
    GroceryDiff,
    Reset,
    State,
}

impl Verb {
    pub fn parse(s: &str) -> Option<Self> {
        serde_json::from_value(Value::String(s.to_owned())).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandRequest {
    pub verb: Verb,
    #[serde(default)]
    pub payload: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Payload does not match the verb's schema.
    BadRequest,
    NotFound,
    /// Valid request that the current state cannot accept.
    Conflict,
    Internal,
}

impl ErrorKind {
    pub fn status(self) -> u16 {
        match self {
            ErrorKind::BadRequest => 400,
            ErrorKind::NotFound => 404,
            ErrorKind::Conflict => 409,
            ErrorKind::Internal => 500,
        }
    }

    fn code(self) -> &'static str {
        match self {
            ErrorKind::BadRequest => "bad_request",
            ErrorKind::NotFound => "not_found",
            ErrorKind::Conflict => "conflict",
            ErrorKind::Internal => "internal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub kind: ErrorKind,
    pub message: String,
}

impl ApiError {
    pub fn bad_request(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::BadRequest,
            message: message.into(),
        }
    }

    pub fn status(&self) -> u16 {
        self.kind.status()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "error": { "code": self.kind.code(), "message": self.message },
            "status": self.status(),
        })
    }
}

impl fmt::Display for ApiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.message, self.kind.code())
    }
}

impl std::error::Error for ApiError {}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::UnknownContext(_) | Error::UnknownInstance(_) => ErrorKind::NotFound,
            Error::DayOutsideWindow { .. }
            | Error::InstanceAlreadyPresent(_)
            | Error::EmptyNetwork
            | Error::NoContextClusters => ErrorKind::Conflict,
            Error::Io { .. } => ErrorKind::Internal,
            _ => ErrorKind::BadRequest,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

pub type ApiResult = Result<Value, ApiError>;

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct TeachPayload {
    context: String,
    /// Context label to learn; defaults to the context name.
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    is_storage: Option<bool>,
    #[serde(default)]
    noisy: bool,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct VisitPayload {
    context: String,
    #[serde(default)]
    day: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ListPayload {
    list: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Empty {}

/// A staged teaching observation awaiting `learn`.
#[derive(Debug, Clone, PartialEq)]
pub struct TeachExemplar {
    pub observation: LatentVariable,
    pub label: String,
    pub is_storage: bool,
}

/// The one live session owned by a service process.
#[derive(Debug, Clone)]
pub struct Session {
    sim: Simulation,
    teach_buffer: Vec<TeachExemplar>,
}

impl Session {
    pub fn new(sim: Simulation) -> Self {
        Self {
            sim,
            teach_buffer: Vec::new(),
        }
    }

    /// A session over the script's household; `pretrain` teaches every context
    /// up front the same way scripted runs do.
    pub fn from_script(script: &ScenarioScript, pretrain: bool) -> crate::Result<Self> {
        script.validate()?;
        let perception = script.perception()?;
        let net = if pretrain {
            train_network(script, &perception, script.rng_seed)?
        } else {
            SustainNetwork::new(perception.vocab.dim(), script.sustain.clone())?
        };
        Ok(Self::new(Simulation::for_script(
            script,
            perception,
            net,
            script.rng_seed,
        )?))
    }

    pub fn simulation(&self) -> &Simulation {
        &self.sim
    }

    pub fn simulation_mut(&mut self) -> &mut Simulation {
        &mut self.sim
    }

    pub fn teach_buffer(&self) -> &[TeachExemplar] {
        &self.teach_buffer
    }

    /// Parses `{"verb": ..., "payload": ...}` and executes it.
    pub fn handle_json(&mut self, request: &str) -> ApiResult {
        let req: CommandRequest =
            serde_json::from_str(request).map_err(|e| ApiError::bad_request(format!("invalid command: {e}")))?;
        self.handle(&req)
    }

    pub fn handle(&mut self, req: &CommandRequest) -> ApiResult {
        self.execute(req.verb, &req.payload)
    }

    pub fn execute(&mut self, verb: Verb, payload: &Value) -> ApiResult {
        match verb {
            Verb::Teach => self.teach(parse(payload)?),
            Verb::Learn => {
                parse_empty(payload)?;
                self.learn()
            }
            Verb::Visit => self.visit(parse(payload)?),
            Verb::Event => self.event(parse(payload)?),
            Verb::Report => {
                parse_empty(payload)?;
                let report = self.sim.report()?;
                Ok(to_value(&report))
            }
            Verb::GroceryDiff => {
                let p: ListPayload = parse(payload)?;
                let user: BTreeSet<String> = p.list.into_iter().map(|s| s.trim().to_owned()).collect();
                let diff = self.sim.grocery_diff(&user);
                Ok(json!({ "userList": user, "suggested": diff, "missingList": self.sim.missing().items() }))
            }
            Verb::Reset => {
                parse_empty(payload)?;
                self.sim.reset_missing();
                Ok(json!({ "missingList": self.sim.missing().items() }))
            }
            Verb::State => {
                parse_empty(payload)?;
                Ok(self.state())
            }
        }
    }

    fn teach(&mut self, p: TeachPayload) -> ApiResult {
        let is_storage = match p.is_storage {
            Some(flag) => flag,
            None => self.sim.environment().is_storage(&p.context)?,
        };
        let day = self.sim.day_cursor();
        let (detections, observation) = self.sim.observe(&p.context, day, p.noisy)?;
        self.teach_buffer.push(TeachExemplar {
            observation,
            label: p.label.unwrap_or_else(|| p.context.clone()),
            is_storage,
        });
        let labels: Vec<&str> = detections.iter().map(|d| d.predicted_label.as_str()).collect();
        Ok(json!({
            "context": p.context,
            "detections": labels,
            "teachBufferCount": self.teach_buffer.len(),
        }))
    }

    fn learn(&mut self) -> ApiResult {
        let staged = std::mem::take(&mut self.teach_buffer);
        let mut recruited = 0;
        for ex in &staged {
            if self
                .sim
                .network_mut()
                .learn_example(&ex.observation, &ex.label, ex.is_storage)?
            {
                recruited += 1;
            }
        }
        Ok(json!({
            "learned": staged.len(),
            "recruited": recruited,
            "clusterCount": self.sim.network().clusters().len(),
        }))
    }

    fn visit(&mut self, p: VisitPayload) -> ApiResult {
        let day = p.day.unwrap_or(self.sim.day_cursor());
        let outcome = self.sim.visit(&p.context, day)?;
        Ok(to_value(&outcome))
    }

    fn event(&mut self, e: ScenarioEvent) -> ApiResult {
        self.sim.apply_event(&e)?;
        Ok(json!({ "applied": e, "location": self.sim.environment().locate(&e.instance_id) }))
    }

    /// Storage items from the most recent report.
    pub fn storage_items(&self) -> BTreeSet<String> {
        self.sim
            .last_report()
            .map(|r| r.storage_items.clone())
            .unwrap_or_default()
    }

    pub fn missing(&self) -> Value {
        json!({
            "missingList": self.sim.missing().items(),
            "storageItems": self.storage_items(),
        })
    }

    pub fn state(&self) -> Value {
        let sim = &self.sim;
        let detections: Vec<&str> = sim
            .latest_detections()
            .iter()
            .map(|d| d.predicted_label.as_str())
            .collect();
        json!({
            "dayCursor": sim.day_cursor(),
            "windowStartDay": sim.stcm().window_start_day(),
            "windowDays": sim.stcm().window_days(),
            "stcmEntries": sim.stcm().len(),
            "currentContext": sim.current_context(),
            "latestDetections": detections,
            "missingList": sim.missing().items(),
            "storageItems": self.storage_items(),
            "teachBufferCount": self.teach_buffer.len(),
            "vocabulary": sim.vocab(),
            "clusters": sim.network().clusters(),
            "contexts": sim.environment().contexts(),
            "lastReport": sim.last_report(),
        })
    }
}

fn parse<T: serde::de::DeserializeOwned>(payload: &Value) -> Result<T, ApiError> {
    serde_json::from_value(payload.clone()).map_err(|e| ApiError::bad_request(format!("invalid payload: {e}")))
}

fn parse_empty(payload: &Value) -> Result<(), ApiError> {
    if payload.is_null() {
        return Ok(());
    }
    parse::<Empty>(payload).map(|_| ())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("response types serialize")
}
