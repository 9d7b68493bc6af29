use crate::error::CliError;
use std::path::Path;
use toml::{Table, Value};

/// Parameters of one command: the `[command]` section of the config file
/// with `key=value` arguments layered on top.
#[derive(Debug, Clone, Default)]
pub struct Params {
    section: String,
    table: Table,
}

/// Top-level keys of the config file that mirror the global flags.
#[derive(Debug, Clone, Default)]
pub struct FileGlobals {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<String>,
}

pub fn load_file(path: Option<&Path>) -> Result<Table, CliError> {
    let Some(path) = path else { return Ok(Table::new()) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<Table>().map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

pub fn globals(file: &Table) -> Result<FileGlobals, CliError> {
    let p = Params { section: "top level".into(), table: file.clone() };
    Ok(FileGlobals {
        tol: p.opt_f64("tol")?,
        seed: p.opt_u64("seed")?,
        jobs: p.opt_u64("jobs")?.map(|j| j as usize),
        out: p.opt_str("out")?,
    })
}

fn canonical_key(k: &str) -> String {
    match k {
        "α" => "alpha",
        "β" => "beta",
        "γ" => "gamma",
        "δ" => "delta",
        "η" => "eta",
        "λ" => "lambda",
        "μ" => "mu",
        "ω" => "omega",
        other => other,
    }
    .to_string()
}

/// A command-line value: TOML syntax when it parses, a bare string otherwise.
fn parse_value(raw: &str) -> Value {
    match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.into())),
        Err(_) => Value::String(raw.into()),
    }
}

impl Params {
    pub fn new(section: &str, file: &Table, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = match file.get(section) {
            Some(Value::Table(t)) => t.clone(),
            Some(_) => return Err(CliError::Config(format!("config entry '{section}' must be a table"))),
            None => Table::new(),
        };
        table = table.into_iter().map(|(k, v)| (canonical_key(&k), v)).collect();
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("argument '{o}' is not of the form key=value")))?;
            table.insert(canonical_key(k.trim()), parse_value(v.trim()));
        }
        Ok(Self { section: section.into(), table })
    }

    pub fn contains(&self, key: &str) -> bool {
        self.table.contains_key(key)
    }

    fn bad(&self, key: &str, what: &str) -> CliError {
        CliError::Config(format!("parameter '{key}' in [{}] must be {what}", self.section))
    }

    fn missing(&self, key: &str) -> CliError {
        CliError::Config(format!("missing parameter '{key}' in [{}]", self.section))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(Value::String(s)) => s.trim().parse().map(Some).map_err(|_| self.bad(key, "a number")),
            Some(_) => Err(self.bad(key, "a number")),
        }
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.opt_f64(key)?.ok_or_else(|| self.missing(key))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    pub fn opt_u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(Value::String(s)) => s.trim().parse().map(Some).map_err(|_| self.bad(key, "a nonnegative integer")),
            Some(_) => Err(self.bad(key, "a nonnegative integer")),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        Ok(self.opt_u64(key)?.map(|v| v as usize).unwrap_or(default))
    }

    pub fn opt_str(&self, key: &str) -> Result<Option<String>, CliError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(self.bad(key, "a string")),
        }
    }

    /// A number, an array of numbers, a comma list "a,b,c" or a range
    /// "lo:hi:n" (n equally spaced points including both ends).
    pub fn list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let v = self.table.get(key).ok_or_else(|| self.missing(key))?;
        let what = "a number, an array, a comma list or lo:hi:n";
        let out = match v {
            Value::Float(x) => vec![*x],
            Value::Integer(i) => vec![*i as f64],
            Value::Array(a) => a
                .iter()
                .map(|x| match x {
                    Value::Float(f) => Ok(*f),
                    Value::Integer(i) => Ok(*i as f64),
                    _ => Err(self.bad(key, what)),
                })
                .collect::<Result<_, _>>()?,
            Value::String(s) => parse_list(s).ok_or_else(|| self.bad(key, what))?,
            _ => return Err(self.bad(key, what)),
        };
        if out.is_empty() {
            return Err(self.bad(key, "nonempty"));
        }
        Ok(out)
    }

    pub fn list_or(&self, key: &str, default: f64) -> Result<Vec<f64>, CliError> {
        if self.contains(key) {
            self.list(key)
        } else {
            Ok(vec![default])
        }
    }

    /// Rows of a real matrix.
    pub fn matrix(&self, key: &str) -> Result<Vec<Vec<f64>>, CliError> {
        let what = "an array of numeric rows";
        let rows = match self.table.get(key) {
            Some(Value::Array(a)) => a,
            Some(Value::String(s)) => {
                let v = parse_value(s);
                if v.is_str() {
                    return Err(self.bad(key, what));
                }
                return Params { section: self.section.clone(), table: [(key.to_string(), v)].into_iter().collect() }
                    .matrix(key)
                    .map_err(|_| self.bad(key, what));
            }
            Some(_) => return Err(self.bad(key, what)),
            None => return Err(self.missing(key)),
        };
        rows.iter()
            .map(|r| match r {
                Value::Array(r) => r
                    .iter()
                    .map(|x| match x {
                        Value::Float(f) => Ok(*f),
                        Value::Integer(i) => Ok(*i as f64),
                        _ => Err(self.bad(key, what)),
                    })
                    .collect(),
                _ => Err(self.bad(key, what)),
            })
            .collect()
    }
}

fn parse_list(s: &str) -> Option<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let lo: f64 = parts[0].trim().parse().ok()?;
        let hi: f64 = parts[1].trim().parse().ok()?;
        let n: usize = parts[2].trim().parse().ok()?;
        return match n {
            0 => None,
            1 => Some(vec![lo]),
            _ => Some((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()),
        };
    }
    s.split(',').map(|p| p.trim().parse().ok()).collect()
}
