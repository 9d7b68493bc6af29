use crate::error::{io_error, CliError};
use fracsub::frac_cauchy::fmt17;
use std::io::Write;
use std::path::PathBuf;

/// Column selection for `plotdata`.
#[derive(Debug, Clone, Default)]
pub struct PlotSpec {
    pub sources: Vec<PathBuf>,
    pub x: Option<String>,
    pub y: Vec<String>,
    pub group: Option<String>,
    /// Each row of a solution CSV becomes a block of (x, value) pairs, the
    /// x coordinates read from the `x=<value>` column labels (real parts only).
    pub snapshots: bool,
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn read(path: &PathBuf) -> Result<Table, CliError> {
    let bad = |m: String| CliError::Config(format!("{}: {m}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header: Vec<String> = r.headers().map_err(|e| bad(e.to_string()))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, v)| match v.parse::<f64>() {
                Ok(x) => Ok(x),
                Err(_) if header.get(j).is_some_and(|h| h == "method") => Ok(f64::NAN),
                Err(_) => Err(bad(format!("row {}: column '{}' is not numeric: '{v}'", i + 1, header.get(j).map_or("?", |h| h)))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(bad("no data rows".into()));
    }
    Ok(Table { header, rows })
}

fn index(t: &Table, col: &str, path: &PathBuf) -> Result<usize, CliError> {
    t.header
        .iter()
        .position(|h| h == col)
        .ok_or_else(|| CliError::Config(format!("{}: no column '{col}' (have {})", path.display(), t.header.join(", "))))
}

fn line(vals: &[f64]) -> String {
    vals.iter().map(|v| fmt17(*v)).collect::<Vec<_>>().join(" ")
}

/// Whitespace-delimited blocks separated by one blank line: one block per
/// value of the group column (or per source file), or per row in snapshot mode.
pub fn run(spec: &PlotSpec, out: &mut dyn Write) -> Result<(), CliError> {
    if spec.sources.is_empty() {
        return Err(CliError::Config("plotdata needs at least one source CSV".into()));
    }
    let mut blocks: Vec<Vec<String>> = Vec::new();
    for path in &spec.sources {
        let t = read(path)?;
        if spec.snapshots {
            let time = index(&t, spec.x.as_deref().unwrap_or("t"), path)?;
            let cols: Vec<(usize, f64)> = t
                .header
                .iter()
                .enumerate()
                .filter(|(j, h)| *j != time && !h.ends_with("_im"))
                .map(|(j, h)| {
                    let label = h.strip_prefix("x=").unwrap_or(h);
                    let label = label.strip_suffix("_re").unwrap_or(label);
                    label.parse::<f64>().map(|x| (j, x)).map_err(|_| {
                        CliError::Config(format!("{}: column '{h}' is not a spatial coordinate x=<value>", path.display()))
                    })
                })
                .collect::<Result<_, _>>()?;
            for row in &t.rows {
                blocks.push(cols.iter().map(|(j, x)| line(&[*x, row[*j]])).collect());
            }
            continue;
        }
        let x = index(&t, spec.x.as_deref().ok_or_else(|| CliError::Config("plotdata needs --x".into()))?, path)?;
        if spec.y.is_empty() {
            return Err(CliError::Config("plotdata needs at least one --y column".into()));
        }
        let ys: Vec<usize> = spec.y.iter().map(|c| index(&t, c, path)).collect::<Result<_, _>>()?;
        let g = spec.group.as_deref().map(|c| index(&t, c, path)).transpose()?;
        let mut current: Option<f64> = None;
        let mut block = Vec::new();
        for row in &t.rows {
            if let Some(g) = g {
                if current.is_some_and(|c| c != row[g]) && !block.is_empty() {
                    blocks.push(std::mem::take(&mut block));
                }
                current = Some(row[g]);
            }
            let mut vals = vec![row[x]];
            vals.extend(ys.iter().map(|&j| row[j]));
            block.push(line(&vals));
        }
        if !block.is_empty() {
            blocks.push(block);
        }
    }
    let text = blocks.iter().map(|b| b.join("\n")).collect::<Vec<_>>().join("\n\n");
    writeln!(out, "{text}").map_err(|e| io_error("writing plot data", e))
}
