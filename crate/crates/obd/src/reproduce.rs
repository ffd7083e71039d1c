//! Bundled reproduction scripts, one per section, each run in its own
//! temporary session.

use std::fmt::Write as _;
use std::time::Instant;

use crate::error::CliError;
use crate::session::Session;

pub struct Section {
    pub id: &'static str,
    pub title: &'static str,
    pub script: &'static str,
    /// Excluded unless explicitly requested.
    pub slow: bool,
}

pub const SECTIONS: &[Section] = &[
    Section {
        id: "s6",
        title: "Beatty sequence over msd_s13 and its sums",
        script: include_str!("../scripts/s6.obd"),
        slow: false,
    },
    Section {
        id: "s7",
        title: "floor(n phi + 1/2) as an additive basis",
        script: include_str!("../scripts/s7.obd"),
        slow: false,
    },
    Section {
        id: "s8",
        title: "Reble's Fibonacci word conjectures",
        script: include_str!("../scripts/s8.obd"),
        slow: false,
    },
    Section {
        id: "s9",
        title: "Complement of floor(n phi^4) and floor(n phi^3)",
        script: include_str!("../scripts/s9.obd"),
        slow: false,
    },
    Section {
        id: "s10",
        title: "Kimberling swappage sequences",
        script: include_str!("../scripts/s10.obd"),
        slow: false,
    },
    Section {
        id: "s11",
        title: "Sums-complement set of sqrt(7)",
        script: include_str!("../scripts/s11.obd"),
        slow: true,
    },
    Section {
        id: "s12",
        title: "Sequences related to sqrt(2)",
        script: include_str!("../scripts/s12.obd"),
        slow: false,
    },
];

#[derive(Debug)]
pub struct SectionResult {
    pub id: &'static str,
    pub title: &'static str,
    pub seconds: f64,
    pub output: String,
    pub failures: Vec<String>,
    /// Set when the script stopped on an error.
    pub error: Option<String>,
}

impl SectionResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.failures.is_empty()
    }
}

/// `which` is a section id (with or without the leading `s`) or `all`.
pub fn select(which: &str, slow: bool) -> Result<Vec<&'static Section>, CliError> {
    if which == "all" {
        return Ok(SECTIONS.iter().filter(|s| slow || !s.slow).collect());
    }
    let id = if which.starts_with('s') {
        which.to_string()
    } else {
        format!("s{which}")
    };
    SECTIONS
        .iter()
        .find(|s| s.id == id)
        .map(|s| vec![s])
        .ok_or_else(|| {
            let ids: Vec<&str> = SECTIONS.iter().map(|s| s.id).collect();
            CliError::Command(format!(
                "unknown section `{which}` (expected one of {} or all)",
                ids.join(", ")
            ))
        })
}

pub fn run_section(section: &'static Section) -> SectionResult {
    let start = Instant::now();
    let mut output = Vec::new();
    let outcome = tempfile::tempdir()
        .map_err(|e| CliError::Command(format!("cannot create a session directory: {e}")))
        .and_then(|dir| {
            let mut session = Session::open(dir.path())?;
            session.run_script(section.script, &mut output)
        });
    let (failures, error) = match outcome {
        Ok(report) => (report.failures, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    SectionResult {
        id: section.id,
        title: section.title,
        seconds: start.elapsed().as_secs_f64(),
        output: String::from_utf8_lossy(&output).into_owned(),
        failures,
        error,
    }
}

#[cfg(feature = "parallel")]
pub fn run_sections(sections: &[&'static Section]) -> Vec<SectionResult> {
    use rayon::prelude::*;
    sections.par_iter().map(|s| run_section(s)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_sections(sections: &[&'static Section]) -> Vec<SectionResult> {
    sections.iter().map(|s| run_section(s)).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn junit(results: &[SectionResult]) -> String {
    let failed = results.iter().filter(|r| !r.passed()).count();
    let total: f64 = results.iter().map(|r| r.seconds).sum();
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<testsuite name=\"reproduce\" tests=\"{}\" failures=\"{failed}\" time=\"{total:.3}\">",
        results.len()
    );
    for r in results {
        let _ = write!(
            out,
            "  <testcase classname=\"reproduce\" name=\"{}\" time=\"{:.3}\">",
            r.id, r.seconds
        );
        if let Some(e) = &r.error {
            let _ = write!(out, "\n    <failure message=\"{}\"/>\n  ", escape(e));
        } else if !r.failures.is_empty() {
            let _ = write!(
                out,
                "\n    <failure message=\"{} expectation(s) failed\">{}</failure>\n  ",
                r.failures.len(),
                escape(&r.failures.join("\n"))
            );
        }
        let _ = writeln!(
            out,
            "<system-out>{}</system-out></testcase>",
            escape(&r.output)
        );
    }
    out.push_str("</testsuite>\n");
    out
}
