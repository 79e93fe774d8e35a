//! Sectioned `key = value` run configuration.
//!
//! Every key is checked against a fixed schema; unknown keys, duplicates,
//! malformed values and broken invariants are reported with line numbers.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::path::PathBuf;

use cornermhd::mhd_linear::CflPolicy;
use cornermhd::mhd_nonlinear::EosModel;
use cornermhd::{DomainKind, DomainSpec};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn at(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: Some(line),
        message: message.into(),
    }
}

fn general(message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: None,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    RunLinear,
    RunPicard,
    EllipticSuite,
    SingularityScan,
    NormStudy,
    CheckSymmetrizer,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::RunLinear,
        Command::RunPicard,
        Command::EllipticSuite,
        Command::SingularityScan,
        Command::NormStudy,
        Command::CheckSymmetrizer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::RunLinear => "run-linear",
            Command::RunPicard => "run-picard",
            Command::EllipticSuite => "elliptic-suite",
            Command::SingularityScan => "singularity-scan",
            Command::NormStudy => "norm-study",
            Command::CheckSymmetrizer => "check-symmetrizer",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataGen {
    Manufactured,
    StandingWave,
    RandomSmooth,
    Picard,
    ConstantFlow,
}

impl DataGen {
    const ALL: [DataGen; 5] = [
        DataGen::Manufactured,
        DataGen::StandingWave,
        DataGen::RandomSmooth,
        DataGen::Picard,
        DataGen::ConstantFlow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DataGen::Manufactured => "manufactured",
            DataGen::StandingWave => "standing-wave",
            DataGen::RandomSmooth => "random-smooth",
            DataGen::Picard => "picard",
            DataGen::ConstantFlow => "constant-flow",
        }
    }

    /// Generators that carry their own equation of state.
    pub fn fixes_eos(self) -> bool {
        matches!(self, DataGen::Manufactured | DataGen::StandingWave)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Minimum observed convergence order in refinement studies.
    pub order_min: f64,
    /// Maximum final error against an exact solution.
    pub max_error: Option<f64>,
    /// Compatibility tolerance; `10 h^2` when unset.
    pub compat: Option<f64>,
    pub picard_tol: f64,
    pub picard_kmax: usize,
    /// Symmetry defect bound of the symmetrizer check.
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityConfig {
    pub s: usize,
    pub t_end: f64,
    pub window: (f64, f64),
    pub fit: bool,
    pub fit_nr: usize,
    pub fit_ntheta: usize,
    pub expect: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: Option<u64>,
    pub domain: DomainSpec,
    pub n1: usize,
    pub n2: usize,
    pub refinements: Vec<usize>,
    pub eos: EosModel,
    pub eos_set: bool,
    pub t_end: f64,
    pub cfl: f64,
    pub dissipation: f64,
    pub output_every: usize,
    pub cfl_policy: CflPolicy,
    pub data: DataGen,
    pub amplitude: f64,
    pub modes: usize,
    pub samples: usize,
    pub out_dir: PathBuf,
    pub tol: Tolerances,
    pub singularity: SingularityConfig,
    pub norm_m: usize,
    pub norm_fields: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Float,
    Int,
    Str,
    List,
    Bool,
}

/// `(section, key, type)`; the empty section is the preamble.
const SCHEMA: &[(&str, &str, Ty)] = &[
    ("", "command", Ty::Str),
    ("", "seed", Ty::Int),
    ("domain", "kind", Ty::Str),
    ("domain", "delta", Ty::Float),
    ("domain", "omega", Ty::Float),
    ("domain", "r0", Ty::Float),
    ("grid", "n", Ty::Int),
    ("grid", "n1", Ty::Int),
    ("grid", "n2", Ty::Int),
    ("grid", "refinements", Ty::List),
    ("eos", "model", Ty::Str),
    ("eos", "gamma", Ty::Float),
    ("eos", "epsilon", Ty::Float),
    ("time", "T", Ty::Float),
    ("time", "cfl", Ty::Float),
    ("time", "dissipation", Ty::Float),
    ("time", "output_every", Ty::Int),
    ("time", "cfl_policy", Ty::Str),
    ("data", "generator", Ty::Str),
    ("data", "amplitude", Ty::Float),
    ("data", "modes", Ty::Int),
    ("data", "samples", Ty::Int),
    ("output", "dir", Ty::Str),
    ("tolerances", "order_min", Ty::Float),
    ("tolerances", "max_error", Ty::Float),
    ("tolerances", "compat", Ty::Float),
    ("tolerances", "picard_tol", Ty::Float),
    ("tolerances", "picard_kmax", Ty::Int),
    ("tolerances", "defect", Ty::Float),
    ("singularity", "s", Ty::Int),
    ("singularity", "T", Ty::Float),
    ("singularity", "window_lo", Ty::Float),
    ("singularity", "window_hi", Ty::Float),
    ("singularity", "fit", Ty::Bool),
    ("singularity", "fit_nr", Ty::Int),
    ("singularity", "fit_ntheta", Ty::Int),
    ("singularity", "expect", Ty::Str),
    ("norms", "m", Ty::Int),
    ("norms", "fields", Ty::Int),
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Parses `2*pi/5`, `π/3`, `0.25` and the like.
pub fn parse_float(s: &str) -> Option<f64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let mut acc = 1.0;
    let mut op = '*';
    let mut tok = String::new();
    let apply = |acc: &mut f64, op: char, tok: &str| -> Option<()> {
        let t = tok.trim();
        let v = match t {
            "pi" | "π" => PI,
            _ if t.ends_with('π') => t.trim_end_matches('π').trim().parse::<f64>().ok()? * PI,
            _ => t.parse::<f64>().ok()?,
        };
        match op {
            '*' => *acc *= v,
            _ => *acc /= v,
        }
        Some(())
    };
    for ch in s.chars() {
        if ch == '*' || ch == '/' {
            apply(&mut acc, op, &tok)?;
            tok.clear();
            op = ch;
        } else {
            tok.push(ch);
        }
    }
    apply(&mut acc, op, &tok)?;
    acc.is_finite().then_some(acc)
}

struct Raw {
    entries: BTreeMap<(String, String), Entry>,
}

impl Raw {
    fn parse(text: &str) -> Result<Raw, ConfigError> {
        let mut section = String::new();
        let mut entries: BTreeMap<(String, String), Entry> = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split(['#', ';']).next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| at(line, format!("malformed section header `{content}`")))?
                    .trim();
                if !SCHEMA.iter().any(|(s, _, _)| *s == name) || name.is_empty() {
                    return Err(at(line, format!("unknown section [{name}]")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| at(line, format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&(_, _, ty)) = SCHEMA.iter().find(|(s, k, _)| *s == section && *k == key) else {
                return Err(at(line, format!("unknown key `{}`", qualified(&section, key))));
            };
            check_type(ty, value).map_err(|m| at(line, format!("`{}`: {m}", qualified(&section, key))))?;
            let slot = (section.clone(), key.to_string());
            if let Some(prev) = entries.get(&slot) {
                return Err(at(
                    line,
                    format!(
                        "duplicate key `{}` (lines {} and {line})",
                        qualified(&section, key),
                        prev.line
                    ),
                ));
            }
            entries.insert(
                slot,
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
        }
        Ok(Raw { entries })
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn float(&self, section: &str, key: &str, default: f64) -> f64 {
        self.get(section, key)
            .and_then(|e| parse_float(&e.value))
            .unwrap_or(default)
    }

    fn opt_float(&self, section: &str, key: &str) -> Option<f64> {
        self.get(section, key).and_then(|e| parse_float(&e.value))
    }

    fn int(&self, section: &str, key: &str, default: usize) -> usize {
        self.get(section, key)
            .and_then(|e| e.value.parse().ok())
            .unwrap_or(default)
    }

    fn str<'a>(&'a self, section: &str, key: &str, default: &'a str) -> &'a str {
        self.get(section, key).map(|e| e.value.as_str()).unwrap_or(default)
    }

    fn line(&self, section: &str, key: &str) -> Option<usize> {
        self.get(section, key).map(|e| e.line)
    }

    fn fail(&self, section: &str, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.line(section, key),
            message: format!("`{}`: {}", qualified(section, key), message.into()),
        }
    }
}

fn qualified(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    }
}

fn parse_list(s: &str) -> Option<Vec<usize>> {
    s.split(',').map(|t| t.trim().parse().ok()).collect()
}

fn check_type(ty: Ty, v: &str) -> Result<(), String> {
    let ok = match ty {
        Ty::Float => parse_float(v).is_some(),
        Ty::Int => v.parse::<u64>().is_ok(),
        Ty::Str => !v.is_empty(),
        Ty::List => parse_list(v).is_some_and(|l| !l.is_empty()),
        Ty::Bool => matches!(v, "true" | "false"),
    };
    if ok {
        Ok(())
    } else {
        let want = match ty {
            Ty::Float => "a number",
            Ty::Int => "a non-negative integer",
            Ty::Str => "a non-empty string",
            Ty::List => "a comma-separated list of integers",
            Ty::Bool => "true or false",
        };
        Err(format!("expected {want}, got `{v}`"))
    }
}

/// Parses and validates a configuration, filling defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_for(text, None)
}

/// As [`parse_config`], with the command taken from the command line when
/// the file has none. A file command must agree with `given`.
pub fn parse_config_for(text: &str, given: Option<Command>) -> Result<RunConfig, ConfigError> {
    let raw = Raw::parse(text)?;
    let command = match (raw.get("", "command"), given) {
        (Some(e), given) => {
            let c = Command::parse(&e.value).ok_or_else(|| {
                let names: Vec<&str> = Command::ALL.iter().map(|c| c.name()).collect();
                at(e.line, format!("unknown command `{}` (one of {})", e.value, names.join(", ")))
            })?;
            if let Some(g) = given.filter(|g| *g != c) {
                return Err(at(
                    e.line,
                    format!("config is for {} but {} was requested", c.name(), g.name()),
                ));
            }
            c
        }
        (None, Some(g)) => g,
        (None, None) => return Err(general("missing `command`")),
    };
    let seed = raw.get("", "seed").map(|e| e.value.parse::<u64>().unwrap_or_default());

    let default_kind = if command == Command::SingularityScan { "sector" } else { "square" };
    let domain = match raw.str("domain", "kind", default_kind) {
        "square" => {
            if raw.get("domain", "omega").is_some() || raw.get("domain", "r0").is_some() {
                return Err(raw.fail("domain", "kind", "omega and r0 apply to sectors only"));
            }
            DomainSpec::square(raw.float("domain", "delta", 1.0)).map_err(|e| raw.fail("domain", "delta", e.to_string()))?
        }
        "sector" => {
            if raw.get("domain", "delta").is_some() {
                return Err(raw.fail("domain", "kind", "delta applies to squares only"));
            }
            let omega = raw.float("domain", "omega", 2.0 * PI / 5.0);
            let r0 = raw.float("domain", "r0", 1.0);
            DomainSpec::sector(omega, r0).map_err(|e| {
                let key = if omega > 0.0 && omega < PI { "r0" } else { "omega" };
                raw.fail("domain", key, e.to_string())
            })?
        }
        other => return Err(raw.fail("domain", "kind", format!("expected square or sector, got `{other}`"))),
    };

    let n = raw.int("grid", "n", 64);
    let n1 = raw.int("grid", "n1", n);
    let n2 = raw.int("grid", "n2", n1);
    for (k, v) in [("n", n), ("n1", n1), ("n2", n2)] {
        if v < 4 {
            return Err(raw.fail("grid", k, format!("need at least 4 cells, got {v}")));
        }
    }
    let default_ref = match command {
        Command::SingularityScan => vec![32, 64, 128, 256],
        Command::EllipticSuite | Command::NormStudy => vec![32, 64, 128],
        _ => Vec::new(),
    };
    let refinements = raw
        .get("grid", "refinements")
        .and_then(|e| parse_list(&e.value))
        .unwrap_or(default_ref);
    if refinements.windows(2).any(|w| w[1] <= w[0]) {
        return Err(raw.fail("grid", "refinements", "must be strictly increasing"));
    }
    if refinements.iter().any(|&r| r < 4) {
        return Err(raw.fail("grid", "refinements", "every grid needs at least 4 cells"));
    }
    if matches!(command, Command::EllipticSuite | Command::NormStudy | Command::SingularityScan) && refinements.len() < 3 {
        return Err(general(format!("{} needs at least 3 refinements", command.name())));
    }

    let default_gen = match command {
        Command::RunPicard => "picard",
        _ => "manufactured",
    };
    let gen_name = raw.str("data", "generator", default_gen);
    let data = DataGen::ALL
        .into_iter()
        .find(|g| g.name() == gen_name)
        .ok_or_else(|| raw.fail("data", "generator", format!("unknown generator `{gen_name}`")))?;
    let allowed: &[DataGen] = match command {
        Command::RunLinear => &[DataGen::Manufactured, DataGen::StandingWave, DataGen::RandomSmooth],
        Command::RunPicard => &[DataGen::Picard, DataGen::RandomSmooth, DataGen::ConstantFlow],
        _ => &[DataGen::Manufactured],
    };
    if raw.get("data", "generator").is_some() && !allowed.contains(&data) {
        return Err(raw.fail("data", "generator", format!("not available for {}", command.name())));
    }

    let eos_set = raw.get("eos", "model").is_some();
    if eos_set && matches!(command, Command::RunLinear) && data.fixes_eos() {
        return Err(raw.fail("eos", "model", format!("generator {} fixes its own equation of state", data.name())));
    }
    let eos = match raw.str("eos", "model", "ideal-gas") {
        "ideal-gas" => EosModel::ideal_gas(raw.float("eos", "gamma", 5.0 / 3.0)).map_err(|e| raw.fail("eos", "gamma", e.to_string()))?,
        "affine" => EosModel::affine(raw.float("eos", "epsilon", 1.0)).map_err(|e| raw.fail("eos", "epsilon", e.to_string()))?,
        other => return Err(raw.fail("eos", "model", format!("expected ideal-gas or affine, got `{other}`"))),
    };

    let default_t = match command {
        Command::RunPicard => 0.1,
        Command::SingularityScan => 0.5,
        _ => 0.25,
    };
    let t_end = raw.float("time", "T", default_t);
    if !(t_end > 0.0) {
        return Err(raw.fail("time", "T", "must be positive"));
    }
    let cfl = raw.float("time", "cfl", 0.45);
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(raw.fail("time", "cfl", format!("must lie in (0, 1], got {cfl}")));
    }
    let dissipation = raw.float("time", "dissipation", 0.02);
    if dissipation < 0.0 {
        return Err(raw.fail("time", "dissipation", "must be non-negative"));
    }
    let output_every = raw.int("time", "output_every", 1);
    if output_every == 0 {
        return Err(raw.fail("time", "output_every", "must be at least 1"));
    }
    let cfl_policy = match raw.str("time", "cfl_policy", "abort") {
        "abort" => CflPolicy::Abort,
        "warn" => CflPolicy::Warn,
        other => return Err(raw.fail("time", "cfl_policy", format!("expected abort or warn, got `{other}`"))),
    };

    let default_amp = match command {
        Command::RunPicard => 1e-2,
        _ => 1.0,
    };
    let amplitude = raw.float("data", "amplitude", default_amp);
    let modes = raw.int("data", "modes", 3);
    let samples = raw.int("data", "samples", 1000);
    if samples == 0 {
        return Err(raw.fail("data", "samples", "must be at least 1"));
    }

    let tol = Tolerances {
        order_min: raw.float("tolerances", "order_min", 1.8),
        max_error: raw.opt_float("tolerances", "max_error"),
        compat: raw.opt_float("tolerances", "compat"),
        picard_tol: raw.float("tolerances", "picard_tol", 1e-12),
        picard_kmax: raw.int("tolerances", "picard_kmax", 12),
        defect: raw.float("tolerances", "defect", 1e-13),
    };
    if tol.picard_kmax == 0 {
        return Err(raw.fail("tolerances", "picard_kmax", "must be at least 1"));
    }

    let window = (
        raw.float("singularity", "window_lo", 0.05),
        raw.float("singularity", "window_hi", 0.4),
    );
    if !(window.0 > 0.0 && window.0 < window.1 && window.1 <= 1.0) {
        return Err(raw.fail("singularity", "window_lo", "need 0 < window_lo < window_hi <= 1"));
    }
    let expect = raw.get("singularity", "expect").map(|e| e.value.clone());
    if let Some(e) = &expect {
        if e != "finite" && e != "divergent" {
            return Err(raw.fail("singularity", "expect", "expected finite or divergent"));
        }
    }
    let singularity = SingularityConfig {
        s: raw.int("singularity", "s", 2),
        t_end: raw.float("singularity", "T", 0.5),
        window,
        fit: raw.str("singularity", "fit", "true") == "true",
        fit_nr: raw.int("singularity", "fit_nr", 256),
        fit_ntheta: raw.int("singularity", "fit_ntheta", 32),
        expect,
    };
    if singularity.s > cornermhd::discrete_calc::SOBOLEV_MAX_ORDER {
        return Err(raw.fail(
            "singularity",
            "s",
            format!("orders above {} are not supported", cornermhd::discrete_calc::SOBOLEV_MAX_ORDER),
        ));
    }
    let norm_m = raw.int("norms", "m", 2);
    let norm_fields = raw.int("norms", "fields", 20);

    let cfg = RunConfig {
        command,
        seed,
        domain,
        n1,
        n2,
        refinements,
        eos,
        eos_set,
        t_end,
        cfl,
        dissipation,
        output_every,
        cfl_policy,
        data,
        amplitude,
        modes,
        samples,
        out_dir: PathBuf::from(raw.str("output", "dir", "out")),
        tol,
        singularity,
        norm_m,
        norm_fields,
    };
    cfg.check_command()?;
    Ok(cfg)
}

impl RunConfig {
    /// Command-specific invariants.
    fn check_command(&self) -> Result<(), ConfigError> {
        let square_only = matches!(
            self.command,
            Command::RunLinear | Command::RunPicard | Command::NormStudy
        );
        if square_only && self.domain.kind != DomainKind::Square {
            return Err(general(format!("{} runs on the square only", self.command.name())));
        }
        if self.command == Command::SingularityScan && self.domain.kind != DomainKind::Sector {
            return Err(general("singularity-scan needs a sector domain"));
        }
        Ok(())
    }

    pub fn randomized(&self) -> bool {
        matches!(self.command, Command::NormStudy | Command::CheckSymmetrizer) || self.data == DataGen::RandomSmooth
    }

    /// Applies command-line overrides and checks the seed requirement.
    pub fn finalize(&mut self, seed: Option<u64>, out: Option<PathBuf>) -> Result<(), ConfigError> {
        if let Some(s) = seed {
            self.seed = Some(s);
        }
        if let Some(o) = out {
            self.out_dir = o;
        }
        if self.randomized() && self.seed.is_none() {
            return Err(general(format!(
                "{} is randomized: set `seed` or pass --seed",
                self.command.name()
            )));
        }
        Ok(())
    }

    /// Resolved configuration without the output location.
    fn echo_body(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command.name());
        match self.seed {
            Some(v) => {
                let _ = writeln!(s, "seed = {v}");
            }
            None => s.push_str("# seed unset\n"),
        }
        s.push_str("\n[domain]\n");
        let _ = writeln!(s, "kind = {}", self.domain.kind);
        match self.domain.kind {
            DomainKind::Square => {
                let _ = writeln!(s, "delta = {}", self.domain.delta);
            }
            DomainKind::Sector => {
                let _ = writeln!(s, "omega = {}", self.domain.omega);
                let _ = writeln!(s, "r0 = {}", self.domain.r0);
            }
        }
        s.push_str("\n[grid]\n");
        let _ = writeln!(s, "n1 = {}\nn2 = {}", self.n1, self.n2);
        if !self.refinements.is_empty() {
            let r: Vec<String> = self.refinements.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "refinements = {}", r.join(", "));
        }
        s.push_str("\n[eos]\n");
        if self.command == Command::RunLinear && self.data.fixes_eos() {
            let _ = writeln!(s, "# fixed by generator {}", self.data.name());
        } else {
            match self.eos.kind {
                cornermhd::mhd_nonlinear::EosKind::IdealGas { gamma } => {
                    let _ = writeln!(s, "model = ideal-gas\ngamma = {gamma}");
                }
                cornermhd::mhd_nonlinear::EosKind::Affine { epsilon } => {
                    let _ = writeln!(s, "model = affine\nepsilon = {epsilon}");
                }
            }
        }
        s.push_str("\n[time]\n");
        let _ = writeln!(
            s,
            "T = {}\ncfl = {}\ndissipation = {}\noutput_every = {}\ncfl_policy = {}",
            self.t_end,
            self.cfl,
            self.dissipation,
            self.output_every,
            match self.cfl_policy {
                CflPolicy::Abort => "abort",
                CflPolicy::Warn => "warn",
            }
        );
        s.push_str("\n[data]\n");
        let _ = writeln!(
            s,
            "generator = {}\namplitude = {}\nmodes = {}\nsamples = {}",
            self.data.name(),
            self.amplitude,
            self.modes,
            self.samples
        );
        s.push_str("\n[tolerances]\n");
        let _ = writeln!(s, "order_min = {}", self.tol.order_min);
        if let Some(v) = self.tol.max_error {
            let _ = writeln!(s, "max_error = {v}");
        }
        if let Some(v) = self.tol.compat {
            let _ = writeln!(s, "compat = {v}");
        }
        let _ = writeln!(
            s,
            "picard_tol = {}\npicard_kmax = {}\ndefect = {}",
            self.tol.picard_tol, self.tol.picard_kmax, self.tol.defect
        );
        let sg = &self.singularity;
        s.push_str("\n[singularity]\n");
        let _ = writeln!(
            s,
            "s = {}\nT = {}\nwindow_lo = {}\nwindow_hi = {}\nfit = {}\nfit_nr = {}\nfit_ntheta = {}",
            sg.s, sg.t_end, sg.window.0, sg.window.1, sg.fit, sg.fit_nr, sg.fit_ntheta
        );
        if let Some(e) = &sg.expect {
            let _ = writeln!(s, "expect = {e}");
        }
        s.push_str("\n[norms]\n");
        let _ = writeln!(s, "m = {}\nfields = {}", self.norm_m, self.norm_fields);
        s
    }

    /// The resolved configuration as parseable text.
    pub fn echo(&self) -> String {
        let mut s = self.echo_body();
        let _ = write!(s, "\n[output]\ndir = {}\n", self.out_dir.display());
        s
    }

    /// First 16 hex digits of the SHA-256 of the resolved configuration
    /// (output location excluded).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.echo_body().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
