//! A scripted run and the same run driven one command at a time must agree.

use grocery_memory::api::{Session, Verb};
use grocery_memory::{run_scenario, scenarios, train_network, Simulation};
use serde_json::{json, Value};

#[test]
fn command_stream_matches_scripted_run() {
    for name in scenarios::names() {
        let script = scenarios::load(name).unwrap();
        let seed = script.rng_seed;
        let perception = script.perception().unwrap();
        let net = train_network(&script, &perception, seed).unwrap();
        let (reports, batch) = run_scenario(&script, net.clone(), perception.clone(), seed).unwrap();

        let sim = Simulation::for_script(&script, perception, net, seed).unwrap();
        let mut session = Session::new(sim);
        let mut streamed = Vec::new();
        for day in 0..script.duration_days {
            if script.reset_on(day) {
                session.execute(Verb::Reset, &Value::Null).unwrap();
            }
            for event in script.events_on(day) {
                session
                    .execute(Verb::Event, &serde_json::to_value(event).unwrap())
                    .unwrap();
            }
            let mut plan = session.simulation_mut().schedule_day(&script, day).unwrap();
            if script.storage_visit_on(day) {
                plan.extend(session.simulation().environment().storage_contexts().map(str::to_owned));
            }
            for ctx in plan {
                session
                    .execute(Verb::Visit, &json!({ "context": ctx, "day": day }))
                    .unwrap();
            }
            if script.closes_window(day) {
                streamed.push(session.execute(Verb::Report, &Value::Null).unwrap());
            }
        }
        let expected: Vec<Value> = reports.iter().map(|r| serde_json::to_value(r).unwrap()).collect();
        assert_eq!(streamed, expected, "{name}");
        assert_eq!(session.simulation().snapshot(), batch.snapshot(), "{name}");
    }
}
