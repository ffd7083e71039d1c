//! Command execution against an environment persisted in a directory.
//!
//! Layout of a session directory:
//!
//! ```text
//! systems.txt    one `name a_1 ... a_m` line per system, registration order
//! index.txt      name \t states \t unix-seconds \t arity \t defining text
//! <name>.aut     automaton text format
//! journal.obd    every successful state-changing command, one per line
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use obd_core::automaton::regex;
use obd_core::basis::{find_min_basis_order, BasisReport, Verdict};
use obd_core::builders::{beatty_sync, canonical_recognizer, shift_relation, BeattySpec};
use obd_core::logic::Environment;
use obd_core::{Automaton, BoolOp, NumerationSystem, PeriodicCF};

use crate::command::{parse, Command, Expectation};
use crate::error::{io, CliError};
use crate::script::{split, Statement};

const SYSTEMS: &str = "systems.txt";
const INDEX: &str = "index.txt";
pub const JOURNAL: &str = "journal.obd";

#[derive(Clone, Debug, PartialEq, Eq)]
struct Meta {
    states: usize,
    timestamp: u64,
    arity: usize,
    text: String,
}

pub struct Session {
    dir: PathBuf,
    env: Environment,
    /// Registration order, for `systems.txt`.
    systems: Vec<(String, Vec<u64>)>,
    meta: BTreeMap<String, Meta>,
    results: BTreeMap<String, bool>,
    reports: BTreeMap<String, BasisReport>,
    failures: Vec<String>,
}

/// Outcome of a script: the expectations that did not hold.
#[derive(Debug, Default)]
pub struct RunReport {
    pub statements: usize,
    pub failures: Vec<String>,
}

fn one_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn spec_of(s: [i64; 5]) -> BeattySpec {
    BeattySpec::new(s[0], s[1], s[2], s[3], s[4])
}

impl Session {
    /// Open (or create) a session directory and load what it holds.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, CliError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(io(&dir))?;
        let mut s = Session {
            dir,
            env: Environment::new(),
            systems: Vec::new(),
            meta: BTreeMap::new(),
            results: BTreeMap::new(),
            reports: BTreeMap::new(),
            failures: Vec::new(),
        };
        s.load()?;
        Ok(s)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    fn read_optional(&self, file: &str) -> Result<Option<String>, CliError> {
        let path = self.dir.join(file);
        match fs::read_to_string(&path) {
            Ok(t) => Ok(Some(t)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io(path)(e)),
        }
    }

    fn load(&mut self) -> Result<(), CliError> {
        if let Some(text) = self.read_optional(SYSTEMS)? {
            for (i, line) in text.lines().enumerate() {
                let mut words = line.split_whitespace();
                let Some(name) = words.next() else { continue };
                let period: Result<Vec<u64>, _> = words.map(str::parse).collect();
                let period = period.map_err(|_| obd_core::Error::Format {
                    line: i + 1,
                    msg: format!("bad period in {SYSTEMS}"),
                })?;
                self.register(name, period)?;
            }
        }
        if let Some(text) = self.read_optional(INDEX)? {
            for (i, line) in text.lines().enumerate() {
                if line.is_empty() {
                    continue;
                }
                let bad = || obd_core::Error::Format {
                    line: i + 1,
                    msg: format!("malformed {INDEX} entry"),
                };
                let f: Vec<&str> = line.splitn(5, '\t').collect();
                let [name, states, timestamp, arity, text] = f[..] else {
                    return Err(bad().into());
                };
                let meta = Meta {
                    states: states.parse().map_err(|_| bad())?,
                    timestamp: timestamp.parse().map_err(|_| bad())?,
                    arity: arity.parse().map_err(|_| bad())?,
                    text: text.to_string(),
                };
                let path = self.dir.join(format!("{name}.aut"));
                let body = fs::read_to_string(&path).map_err(io(&path))?;
                let env = &self.env;
                let aut = Automaton::from_text(&body, |s| env.system(s).ok())?;
                self.env.set_predicate(name, aut, meta.text.clone());
                self.meta.insert(name.to_string(), meta);
            }
        }
        Ok(())
    }

    fn register(&mut self, name: &str, period: Vec<u64>) -> Result<Arc<NumerationSystem>, CliError> {
        let system = NumerationSystem::new(name, PeriodicCF::new(period.clone())?)?;
        self.systems.retain(|(n, _)| n != name);
        self.systems.push((name.to_string(), period));
        Ok(self.env.add_system(system))
    }

    fn write_atomic(&self, file: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(file);
        let tmp = self.dir.join(format!(".{file}.tmp"));
        fs::write(&tmp, contents).map_err(io(&tmp))?;
        fs::rename(&tmp, &path).map_err(io(&path))
    }

    fn save_systems(&self) -> Result<(), CliError> {
        let mut out = String::new();
        for (name, period) in &self.systems {
            let p: Vec<String> = period.iter().map(u64::to_string).collect();
            out.push_str(&format!("{name} {}\n", p.join(" ")));
        }
        self.write_atomic(SYSTEMS, &out)
    }

    fn save_index(&self) -> Result<(), CliError> {
        let mut out = String::new();
        for (name, m) in &self.meta {
            out.push_str(&format!(
                "{name}\t{}\t{}\t{}\t{}\n",
                m.states, m.timestamp, m.arity, m.text
            ));
        }
        self.write_atomic(INDEX, &out)
    }

    fn store(&mut self, name: &str, aut: Automaton, text: &str) -> Result<usize, CliError> {
        let states = aut.state_count();
        self.write_atomic(&format!("{name}.aut"), &aut.to_text())?;
        let text = one_line(text);
        self.meta.insert(
            name.to_string(),
            Meta {
                states,
                timestamp: now(),
                arity: aut.arity(),
                text: text.clone(),
            },
        );
        self.env.set_predicate(name, aut, text);
        self.save_index()?;
        Ok(states)
    }

    fn journal(&self, st: &Statement) -> Result<(), CliError> {
        let path = self.dir.join(JOURNAL);
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(io(&path))?;
        let end = if st.verbose { "::" } else { ";" };
        writeln!(f, "{}{end}", one_line(&st.text)).map_err(io(&path))
    }

    fn system_or_default(&self, name: &Option<String>) -> Result<Arc<NumerationSystem>, CliError> {
        Ok(match name {
            Some(n) => self.env.system(n)?,
            None => self.env.default_system(),
        })
    }

    fn automaton(&self, name: &str) -> Result<&Automaton, CliError> {
        Ok(&self.env.predicate(name)?.automaton)
    }

    /// Run every statement of a script. Errors stop the run; failed
    /// expectations are collected and reported at the end.
    pub fn run_script(&mut self, source: &str, out: &mut dyn Write) -> Result<RunReport, CliError> {
        let statements = split(source)?;
        let before = self.failures.len();
        for st in &statements {
            self.execute(st, out).map_err(|e| CliError::At {
                line: st.line,
                source: Box::new(e),
            })?;
        }
        Ok(RunReport {
            statements: statements.len(),
            failures: self.failures[before..].to_vec(),
        })
    }

    pub fn execute(&mut self, st: &Statement, out: &mut dyn Write) -> Result<(), CliError> {
        let cmd = parse(&st.text)?;
        let mutating = !matches!(
            cmd,
            Command::Info { .. } | Command::Enum { .. } | Command::ExportDot { .. } | Command::Expect { .. }
        );
        let start = Instant::now();
        let msg = self.apply(&cmd, st.verbose)?;
        let elapsed = start.elapsed().as_millis();
        for line in msg {
            let _ = writeln!(out, "{line}");
        }
        if st.verbose {
            let _ = writeln!(out, "# {elapsed} ms");
        }
        if mutating {
            self.journal(st)?;
        }
        Ok(())
    }

    fn apply(&mut self, cmd: &Command, verbose: bool) -> Result<Vec<String>, CliError> {
        let mut lines = Vec::new();
        match cmd {
            Command::Ost { name, period } => {
                let system = self.register(name, period.clone())?;
                self.save_systems()?;
                let qs: Vec<String> = (0..8)
                    .filter_map(|i| system.try_q(i))
                    .map(|q| q.to_string())
                    .collect();
                lines.push(format!("msd_{name}: gamma = {}", system.gamma()));
                lines.push(format!("q = {}, ...", qs.join(", ")));
            }
            Command::Def { name, formula } => {
                let compiled = self.env.compile_text(formula, verbose)?;
                if verbose {
                    lines.extend(compiled.stats.log.iter().cloned());
                    lines.push(format!(
                        "# largest intermediate automaton has {} states",
                        compiled.stats.largest_intermediate
                    ));
                }
                let states = self.store(name, compiled.automaton, formula)?;
                lines.push(format!("{name}: {states} states"));
            }
            Command::Regex {
                name,
                system,
                alphabets,
                arity,
                pattern,
            } => {
                let system = self.system_or_default(system)?;
                let raw = regex::compile(&system, *arity, alphabets.as_deref(), pattern)?;
                let aut = raw
                    .normalize_zeros()
                    .product(&canonical_recognizer(&system, *arity), BoolOp::And)?;
                let states = self.store(name, aut, &format!("\"{pattern}\""))?;
                lines.push(format!("{name}: {states} states"));
            }
            Command::Eval { name, formula } => {
                let compiled = self.env.compile_text(formula, verbose)?;
                if !compiled.vars.is_empty() {
                    return Err(obd_core::Error::FreeVariables(compiled.vars).into());
                }
                if verbose {
                    lines.extend(compiled.stats.log.iter().cloned());
                    lines.push(format!(
                        "# largest intermediate automaton has {} states",
                        compiled.stats.largest_intermediate
                    ));
                }
                let truth = compiled.automaton.truth();
                self.results.insert(name.clone(), truth);
                lines.push(format!("{name}: {}", if truth { "TRUE" } else { "FALSE" }));
            }
            Command::Combine { name, parts } => {
                let mut inputs = Vec::with_capacity(parts.len());
                for (p, v) in parts {
                    inputs.push((p.clone(), self.automaton(p)?.clone(), *v));
                }
                let aut = obd_core::automaton::combine(&inputs, 0)?;
                let text: Vec<String> = parts.iter().map(|(p, v)| format!("{p}={v}")).collect();
                let states = self.store(name, aut, &format!("combine {}", text.join(" ")))?;
                lines.push(format!("{name}: {states} states"));
            }
            Command::Shift { name, system } => {
                let system = self.system_or_default(system)?;
                let rel = shift_relation(&system)?;
                let states = self.store(name, rel.automaton, &format!("shift msd_{}", system.name()))?;
                lines.push(format!("{name}: {states} states"));
            }
            Command::Beatty {
                name,
                system,
                spec,
                first_index,
            } => {
                let system = self.system_or_default(system)?;
                let b = spec_of(*spec);
                let aut = if *first_index == 1 {
                    beatty_sync(&system, &b)?.automaton
                } else {
                    obd_core::basis::sequence_relation(&system, &b, *first_index)?.into_automaton()
                };
                let [a, bb, c, d, e] = spec;
                let text = format!("beatty msd_{} {a} {bb} {c} {d} {e} from {first_index}", system.name());
                let states = self.store(name, aut, &text)?;
                lines.push(format!("{name}: {states} states"));
            }
            Command::Basis {
                name,
                system,
                spec,
                cap,
                first_index,
            } => {
                let system = self.system_or_default(system)?;
                let report = find_min_basis_order(&system, &spec_of(*spec), *cap, *first_index)?;
                let verdict = match &report.verdict {
                    Verdict::Basis => format!("basis of order {}", report.order),
                    Verdict::Asymptotic { exceptional } => format!(
                        "asymptotic basis of order {}, exceptions {exceptional:?}",
                        report.order
                    ),
                    Verdict::NotBasisAtCap => format!("no basis of order <= {cap}"),
                };
                lines.push(format!(
                    "{name}: alpha = {}, beta = {}: {verdict}",
                    report.alpha, report.beta
                ));
                self.reports.insert(name.clone(), report);
            }
            Command::Info { name } => {
                let p = self.env.predicate(name)?;
                let a = &p.automaton;
                let kind = if a.outputs().is_some() { "output automaton" } else { "automaton" };
                lines.push(format!(
                    "{name}: {kind} over msd_{}, arity {}, {} states",
                    a.system().name(),
                    a.arity(),
                    a.state_count()
                ));
                lines.push(format!("  {}", p.text));
            }
            Command::Enum { name, count } => {
                let a = self.automaton(name)?;
                let system = a.system().clone();
                for t in a.smallest(*count)? {
                    let vals: Vec<String> = t.iter().map(u64::to_string).collect();
                    let reps: Vec<String> = t
                        .iter()
                        .map(|&v| system.format_digits(&system.encode(v)))
                        .collect();
                    lines.push(format!("({})  [{}]", vals.join(", "), reps.join(", ")));
                }
            }
            Command::ExportDot { name, path } => {
                let dot = self.automaton(name)?.to_dot(name);
                let path = match path {
                    Some(p) => PathBuf::from(p),
                    None => self.dir.join(format!("{name}.dot")),
                };
                fs::write(&path, dot).map_err(io(&path))?;
                lines.push(format!("{name}: wrote {}", path.display()));
            }
            Command::Expect { name, what } => match self.check(name, what) {
                Ok(()) => lines.push(format!("ok: {name} {what}")),
                Err(CliError::Expectation(msg)) => {
                    lines.push(format!("FAILED: {name}: {msg}"));
                    self.failures.push(format!("{name}: {msg}"));
                }
                Err(e) => return Err(e),
            },
        }
        Ok(lines)
    }

    fn check(&self, name: &str, what: &Expectation) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Expectation(msg));
        match what {
            Expectation::Truth(want) => {
                let got = match self.results.get(name) {
                    Some(&t) => t,
                    None => {
                        let a = self.automaton(name)?;
                        if a.arity() != 0 {
                            return fail(format!("has {} free variables", a.arity()));
                        }
                        a.truth()
                    }
                };
                if got != *want {
                    return fail(format!("expected {}, got {}", upper(*want), upper(got)));
                }
            }
            Expectation::States(n) => {
                let got = self.automaton(name)?.state_count();
                if got != *n {
                    return fail(format!("expected {n} states, got {got}"));
                }
            }
            Expectation::Values(values) => {
                let a = self.automaton(name)?;
                if a.arity() != 2 {
                    return fail(format!("arity {} is not a relation (n, z)", a.arity()));
                }
                let ceiling = values.iter().max().copied().unwrap_or(0) * 2 + 2;
                for (n, &v) in values.iter().enumerate() {
                    let hits: Vec<u64> = (0..=ceiling)
                        .filter(|&z| a.accepts_values(&[n as u64, z]).unwrap_or(false))
                        .collect();
                    if hits != [v] {
                        return fail(format!("at n = {n}: expected {v}, accepted {hits:?}"));
                    }
                }
            }
            Expectation::Outputs(values) => {
                let a = self.automaton(name)?;
                for (n, &v) in values.iter().enumerate() {
                    let got = a.output_on(&[n as u64])?;
                    if got != Some(v) {
                        return fail(format!("at n = {n}: expected {v}, got {got:?}"));
                    }
                }
            }
            Expectation::OutputsIn(allowed) => {
                let got = self.automaton(name)?.output_values();
                if got.iter().any(|v| !allowed.contains(v)) {
                    return fail(format!("outputs {got:?} not within {allowed:?}"));
                }
            }
            Expectation::Beatty {
                spec,
                first_index,
                upto,
            } => {
                let a = self.automaton(name)?;
                let system = a.system().clone();
                let b = spec_of(*spec);
                for n in *first_index..*upto {
                    let v = b.value(&system, n)?;
                    let v = u64::try_from(&v)
                        .map_err(|_| CliError::Expectation(format!("value at n = {n} is {v}")))?;
                    let ok = a.accepts_values(&[n, v])?
                        && !a.accepts_values(&[n, v + 1])?
                        && (v == 0 || !a.accepts_values(&[n, v - 1])?);
                    if !ok {
                        return fail(format!("disagrees with the exact value {v} at n = {n}"));
                    }
                }
            }
            Expectation::Order { order, exceptional } => {
                let Some(r) = self.reports.get(name) else {
                    return fail("no basis report of that name".into());
                };
                let got_ex: Vec<u64> = match &r.verdict {
                    Verdict::Basis => vec![],
                    Verdict::Asymptotic { exceptional } => exceptional.clone(),
                    Verdict::NotBasisAtCap => return fail("no order found within the cap".into()),
                };
                if r.order != *order || &got_ex != exceptional {
                    return fail(format!(
                        "expected order {order} except {exceptional:?}, got order {} except {got_ex:?}",
                        r.order
                    ));
                }
            }
        }
        Ok(())
    }
}

fn upper(b: bool) -> &'static str {
    if b {
        "TRUE"
    } else {
        "FALSE"
    }
}
