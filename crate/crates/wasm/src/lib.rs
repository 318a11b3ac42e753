//! String-in, string-out bindings for the browser demo. Every function takes a
//! JSON problem config and returns a JSON report; errors come back as
//! `{"error": ..., "exit_code": ...}`.

use mcg_orbits::cli::{self, CliError, Command, ProblemConfig, Report};
use mcg_orbits::orbit::Group;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn render(r: Result<Report, CliError>) -> String {
    let report = cli::report_or_error(r);
    let mut body = report.body;
    if let Some(obj) = body.as_object_mut() {
        obj.insert("exit_code".into(), json!(report.exit_code));
    }
    serde_json::to_string_pretty(&body).expect("json")
}

/// Finite-orbit verdict and bounds.
#[wasm_bindgen]
pub fn classify_json(config: &str) -> String {
    render(ProblemConfig::from_str(config).and_then(|c| {
        cli::run(&Command::Classify { search_cap: None }, &c)
    }))
}

/// Orbit enumeration under the pure (`"pure"`) or full (`"full"`) group.
#[wasm_bindgen]
pub fn orbit_json(config: &str, group: &str, cap: u32) -> String {
    render((|| {
        let c = ProblemConfig::from_str(config)?;
        let group: Group = group.parse().map_err(CliError::Config)?;
        let cmd = Command::Orbit {
            group: Some(group),
            cap: Some(cap as usize),
            parallel: false,
        };
        cli::run(&cmd, &c)
    })())
}

/// Image of the class under a word such as `"t1 t2^-1 s1"`.
#[wasm_bindgen]
pub fn act_json(config: &str, word: &str) -> String {
    render(ProblemConfig::from_str(config).and_then(|c| {
        cli::run(
            &Command::Act {
                word: Some(word.to_string()),
            },
            &c,
        )
    }))
}
