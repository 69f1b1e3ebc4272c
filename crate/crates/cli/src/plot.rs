//! Comma-separated text for plotting: a `time` column followed by one
//! column per requested series.

use std::io::Write;
use std::str::FromStr;

use crate::container::ResultContainer;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// Every vertex population.
    Populations,
    /// Population of one vertex, numbered from 1.
    Population(usize),
    CoherenceNorm,
}

impl FromStr for Quantity {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "populations" => Ok(Quantity::Populations),
            "coherence_norm" => Ok(Quantity::CoherenceNorm),
            _ => match s.strip_prefix("population:").map(str::parse::<usize>) {
                Some(Ok(v)) if v >= 1 => Ok(Quantity::Population(v)),
                _ => Err(CliError::Config(format!(
                    "unknown quantity `{s}` (expected populations, population:K or coherence_norm)"
                ))),
            },
        }
    }
}

struct Column<'a> {
    header: String,
    values: Box<dyn Fn(usize) -> f64 + 'a>,
}

fn columns<'a>(c: &'a ResultContainer, quantity: Quantity) -> Result<Vec<Column<'a>>, CliError> {
    let missing = |name: &str| CliError::Config(format!("container has no `{name}` data"));
    match quantity {
        Quantity::Populations | Quantity::Population(_) => {
            let p = c.array("populations").ok_or_else(|| missing("populations"))?;
            let n = p.shape[1];
            let wanted: Vec<usize> = match quantity {
                Quantity::Population(v) if v > n => {
                    return Err(CliError::Config(format!("vertex {v} outside 1..={n}")));
                }
                Quantity::Population(v) => vec![v - 1],
                _ => (0..n).collect(),
            };
            Ok(wanted
                .into_iter()
                .map(|j| Column {
                    header: format!("p{}", j + 1),
                    values: Box::new(move |k| p.data[k * n + j]),
                })
                .collect())
        }
        Quantity::CoherenceNorm => {
            let a = c.array("coherence_norm").ok_or_else(|| missing("coherence_norm"))?;
            Ok(vec![Column {
                header: "coherence_norm".into(),
                values: Box::new(move |k| a.data[k]),
            }])
        }
    }
}

pub fn emit_plot_data(c: &ResultContainer, quantities: &[Quantity], mut out: impl Write) -> Result<(), CliError> {
    if quantities.is_empty() {
        return Err(CliError::Config("no quantities requested".into()));
    }
    let times = c
        .array("times")
        .ok_or_else(|| CliError::Config("container has no times".into()))?;
    let mut cols = Vec::new();
    for &q in quantities {
        cols.extend(columns(c, q)?);
    }
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    let header: Vec<&str> = std::iter::once("time")
        .chain(cols.iter().map(|c| c.header.as_str()))
        .collect();
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    for (k, t) in times.data.iter().enumerate() {
        let mut line = t.to_string();
        for col in &cols {
            line.push(',');
            line.push_str(&(col.values)(k).to_string());
        }
        writeln!(out, "{line}").map_err(io)?;
    }
    Ok(())
}
