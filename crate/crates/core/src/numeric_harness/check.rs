use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Exact,
    Fd,
    Mc,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Exact => "exact",
            Kind::Fd => "fd",
            Kind::Mc => "mc",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Exact checks report a canonical string, numeric ones an error magnitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Observed {
    Number(f64),
    Exact(String),
}

impl std::fmt::Display for Observed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Observed::Number(x) => write!(f, "{x:e}"),
            Observed::Exact(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub kind: Kind,
    pub status: Status,
    pub observed: Observed,
    pub tolerance: Option<f64>,
    pub details: String,
    pub seed: Option<u64>,
}

impl CheckResult {
    /// Literal comparison: passes iff `observed == expected`.
    pub fn exact(id: impl Into<String>, observed: impl ToString, expected: impl ToString) -> Self {
        let (o, e) = (observed.to_string(), expected.to_string());
        let status = if o == e { Status::Pass } else { Status::Fail };
        CheckResult { id: id.into(), kind: Kind::Exact, status, observed: Observed::Exact(o), tolerance: None, details: format!("expected {e}"), seed: None }
    }

    /// A boolean exact property; `observed` is "true"/"false".
    pub fn holds(id: impl Into<String>, ok: bool, details: impl Into<String>) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        CheckResult { id: id.into(), kind: Kind::Exact, status, observed: Observed::Exact(ok.to_string()), tolerance: None, details: details.into(), seed: None }
    }

    /// `error ≤ tolerance`; NaN fails.
    pub fn fd(id: impl Into<String>, error: f64, tolerance: f64, details: impl Into<String>) -> Self {
        CheckResult {
            id: id.into(),
            kind: Kind::Fd,
            status: if error <= tolerance { Status::Pass } else { Status::Fail },
            observed: Observed::Number(error),
            tolerance: Some(tolerance),
            details: details.into(),
            seed: None,
        }
    }

    /// `|mean − target| ≤ k·SE`, with `k = 3` by default.
    pub fn mc(id: impl Into<String>, mean: f64, se: f64, target: f64, k: f64, seed: u64) -> Self {
        let err = (mean - target).abs();
        let tol = k * se;
        CheckResult {
            id: id.into(),
            kind: Kind::Mc,
            status: if err <= tol || (err == 0.0 && se == 0.0) { Status::Pass } else { Status::Fail },
            observed: Observed::Number(err),
            tolerance: Some(tol),
            details: format!("mean {mean:.6e}, se {se:.3e}, exact {target:.6e}"),
            seed: Some(seed),
        }
    }

    /// A check that could not run.
    pub fn errored(id: impl Into<String>, kind: Kind, err: impl std::fmt::Display) -> Self {
        CheckResult { id: id.into(), kind, status: Status::Fail, observed: Observed::Exact("error".into()), tolerance: None, details: err.to_string(), seed: None }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
}

impl Summary {
    pub fn of(results: &[CheckResult]) -> Self {
        let pass = results.iter().filter(|r| r.passed()).count();
        Summary { pass, fail: results.len() - pass }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsEcho {
    /// An integer or `"sym"`.
    pub m: String,
    pub n2: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub suite: String,
    pub samples: usize,
    pub seed: u64,
    pub fd_step: f64,
    pub richardson: bool,
}

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub params: ParamsEcho,
    pub config: ConfigEcho,
    pub results: Vec<CheckResult>,
    pub closed_forms: BTreeMap<String, String>,
    pub summary: Summary,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,kind,status,observed,tolerance,seed\n");
        for r in &self.results {
            let status = if r.passed() { "pass" } else { "fail" };
            let observed = match &r.observed {
                Observed::Number(x) => format!("{x:e}"),
                Observed::Exact(s) => s.clone(),
            };
            let tol = r.tolerance.map(|t| format!("{t:e}")).unwrap_or_default();
            let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{},{},{}\n", csv_field(&r.id), r.kind.as_str(), status, csv_field(&observed), tol, seed));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let tag = if r.passed() { "PASS" } else { "FAIL" };
            let tol = r.tolerance.map(|t| format!(" (tol {t:e})")).unwrap_or_default();
            out.push_str(&format!("{tag}  {:<44} {:>5}  {}{tol}\n", r.id, r.kind.as_str(), r.observed));
        }
        if !self.closed_forms.is_empty() {
            out.push('\n');
            for (k, v) in &self.closed_forms {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out.push_str(&format!("\n{} passed, {} failed\n", self.summary.pass, self.summary.fail));
        out
    }
}
