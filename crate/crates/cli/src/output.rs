//! Run manifests, error objects and the JSON/CSV writers.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use delta_shells::{Error, ScanPlan, ShellConfig};
use serde::Serialize;

pub const TOOL: &str = "delta-shells";

/// Where the shell configuration came from.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigSource {
    /// `path`, `stdin` or `flags`.
    pub origin: &'static str,
    pub path: Option<String>,
    pub config: ShellConfig,
}

/// Everything needed to reproduce a run. Wall time is left out on purpose so
/// identical inputs give identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: Option<ConfigSource>,
    pub plan: Option<ScanPlan>,
    pub parameters: serde_json::Value,
    pub threads: Option<usize>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &'static str) -> Self {
        RunManifest {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            command,
            input: None,
            plan: None,
            parameters: serde_json::Value::Null,
            threads: None,
            outputs: Vec::new(),
        }
    }
}

/// A failed run: exit status plus the machine-readable reason.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    #[serde(skip)]
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn input(kind: &str, message: impl Into<String>) -> Self {
        Failure { code: 2, kind: kind.into(), message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        use Error::*;
        let (code, kind) = match &e {
            NonIncreasingRadii(_) => (2, "NonIncreasingRadii"),
            NonPositiveRadius(_) => (2, "NonPositiveRadius"),
            LengthMismatch { .. } => (2, "LengthMismatch"),
            NonFiniteCoupling(_) => (2, "NonFiniteCoupling"),
            EmptyConfig => (2, "EmptyConfig"),
            WrongShellCount(_) => (2, "WrongShellCount"),
            UnsupportedOrder { .. } => (2, "UnsupportedOrder"),
            InvalidArgument(_) => (2, "InvalidArgument"),
            SWaveThresholdForbidden => (2, "SWaveThresholdForbidden"),
            InvalidPlan(_) => (2, "InvalidPlan"),
            InvalidCalibration(_) => (2, "InvalidCalibration"),
            NoInnerBoundState { .. } => (3, "NoInnerBoundState"),
            Overflow { .. } => (4, "Overflow"),
            MatchingOverflow(_) => (4, "MatchingOverflow"),
            DegenerateRoot { .. } => (4, "DegenerateRoot"),
            MissingRoot => (4, "MissingRoot"),
            EllMaxReached(_) => (4, "EllMaxReached"),
            RootsNotResolved { .. } => (4, "RootsNotResolved"),
            CountingViolation(_) => (4, "CountingViolation"),
            SingularWronskian(_) => (4, "SingularWronskian"),
            NotARoot { .. } => (4, "NotARoot"),
        };
        Failure { code, kind: kind.into(), message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::input("Io", e.to_string())
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    manifest: &'a RunManifest,
    error: &'a Failure,
}

/// Shortest round-trip text for a CSV cell.
pub fn fmt_float(x: f64) -> String {
    format!("{x:?}")
}

/// Comma-separated table with a header row and LF line endings.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { text: header.join(",") + "\n" }
    }

    pub fn row(&mut self, cells: &[f64]) {
        let line: Vec<String> = cells.iter().map(|&c| fmt_float(c)).collect();
        let _ = writeln!(self.text, "{}", line.join(","));
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output records serialize");
    s.push('\n');
    s
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Write to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

/// Machine-readable error on stdout, one human line on stderr.
pub fn report_failure(manifest: &RunManifest, failure: &Failure) {
    eprintln!("error: {}", failure.message);
    let _ = emit(None, &to_json(&ErrorReport { manifest, error: failure }));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, 1234.5] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_float(0.5), "0.5");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.row(&[1.0, -0.25]);
        assert_eq!(t.as_str(), "a,b\n1.0,-0.25\n");
    }

    #[test]
    fn sidecar_appends_suffix() {
        assert_eq!(sidecar_path(Path::new("run/scan.csv")), PathBuf::from("run/scan.csv.manifest.json"));
    }

    #[test]
    fn exit_codes_by_category() {
        assert_eq!(Failure::from(Error::EmptyConfig).code, 2);
        assert_eq!(Failure::from(Error::NoInnerBoundState { r1: 1.0, alpha1: -0.5 }).code, 3);
        assert_eq!(Failure::from(Error::EllMaxReached(4)).code, 4);
        assert_eq!(Failure::from(Error::RootsNotResolved { d_cutoff: 9.0, usable: 2 }).kind, "RootsNotResolved");
    }
}
