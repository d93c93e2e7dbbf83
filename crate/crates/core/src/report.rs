//! Report envelopes and renderers. Every report carries the resolved config,
//! its hash, the sample count and the master seed, so each number can be
//! traced back to the run that produced it. Output is deterministic: no
//! timestamps, durations or host details.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::asymptotic::{asymptotic_bits, Variant};
use crate::config::{OutputFormat, RunConfig};
use crate::families::{CurveInstance, StandardCurve};
use crate::pairing::RankedFamily;
use crate::security::{LevelResult, SecurityProfile, SweepResult};
use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Hex SHA-256 of the config's canonical TOML form.
pub fn config_hash(config: &RunConfig) -> String {
    let digest = Sha256::digest(config.to_toml_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Report<T> {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub sample_count: u64,
    pub master_seed: u64,
    pub config: RunConfig,
    pub results: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, config: &RunConfig, results: T) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config_hash: config_hash(config),
            sample_count: config.run.samples,
            master_seed: config.run.seed,
            config: config.clone(),
            results,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// Renders in `format`; `table` is the flat view used by CSV and markdown.
    pub fn render(&self, table: &Table, format: OutputFormat) -> Result<String> {
        Ok(match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => table.to_csv()?,
            OutputFormat::Markdown => format!(
                "## {}\n\n{}\nconfig_hash: `{}`, samples: {}, seed: {}, schema: {}\n",
                self.command,
                table.to_markdown(),
                self.config_hash,
                self.sample_count,
                self.master_seed,
                self.schema_version
            ),
        })
    }
}

/// Flat rows for CSV and markdown output.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| crate::Error::Io(std::io::Error::other(e));
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_markdown(&self) -> String {
        let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
        let mut s = line(&self.columns);
        s.push_str(&line(&vec!["---".to_string(); self.columns.len()]));
        for r in &self.rows {
            s.push_str(&line(r));
        }
        s
    }
}

fn f2(x: f64) -> String {
    format!("{x:.2}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn profiles_table(profiles: &[SecurityProfile]) -> Table {
    let mut t = Table::new([
        "curve", "family", "p_bits", "r_bits", "A", "log2_B", "log2_N1", "log2_N2",
        "field_bits", "curve_bits", "combined_bits", "security_bits",
    ]);
    for p in profiles {
        let b = &p.field.best;
        t.push(vec![
            p.curve.clone().unwrap_or_else(|| format!("{}-{}", p.family, p.p_bits)),
            p.family.clone(),
            p.p_bits.to_string(),
            p.r_bits.to_string(),
            b.a.to_string(),
            format!("{:.1}", b.log2_b),
            f2(p.field.norm.log2_n1),
            f2(p.field.norm.log2_n2),
            f2(p.field_side_bits),
            f2(p.curve_side_bits),
            f2(p.combined_bits),
            p.security_bits.to_string(),
        ]);
    }
    t
}

/// One row per family, one column per level.
pub fn levels_table(levels: &[u64], results: &[LevelResult]) -> Table {
    let mut t = Table::new(
        std::iter::once("family".to_string()).chain(levels.iter().map(|l| format!("{l}-bit"))),
    );
    let mut families: Vec<&str> = Vec::new();
    for r in results {
        if !families.contains(&r.family.as_str()) {
            families.push(&r.family);
        }
    }
    for f in families {
        let mut row = vec![f.to_string()];
        row.extend(levels.iter().map(|&l| {
            opt(results
                .iter()
                .find(|r| r.family == f && r.level_bits == l)
                .and_then(|r| r.p_bits))
        }));
        t.push(row);
    }
    t
}

pub fn sweep_table(sweep: &SweepResult) -> Table {
    let mut t = Table::new(["p_bits", "curve_bits", "field_bits"]);
    for p in &sweep.points {
        t.push(vec![p.p_bits.to_string(), f2(p.curve_side_bits), f2(p.field_side_bits)]);
    }
    t
}

#[derive(Clone, Debug, Serialize)]
pub struct RankingAtLevel {
    pub level_bits: u64,
    pub ranking: Vec<RankedFamily>,
}

pub fn ranking_table(rankings: &[RankingAtLevel]) -> Table {
    let mut t = Table::new(["level_bits", "rank", "family", "p_bits", "log2_cost"]);
    for r in rankings {
        for (i, f) in r.ranking.iter().enumerate() {
            t.push(vec![
                r.level_bits.to_string(),
                (i + 1).to_string(),
                f.family.clone(),
                opt(f.p_bits),
                opt(f.log2_cost.map(f2)),
            ]);
        }
    }
    t
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub variant: String,
    pub c: f64,
    pub epsilon: Option<f64>,
    pub q_bits: u64,
    pub log2_cost: f64,
}

pub fn asymptotic_rows(q_bits: &[u64], variants: &[Variant]) -> Result<Vec<AsymptoticRow>> {
    let mut out = Vec::new();
    for &q in q_bits {
        for v in variants {
            out.push(AsymptoticRow {
                variant: v.name(),
                c: v.c(),
                epsilon: v.epsilon(),
                q_bits: q,
                log2_cost: asymptotic_bits(q, *v)?,
            });
        }
    }
    Ok(out)
}

pub fn asymptotic_table(rows: &[AsymptoticRow]) -> Table {
    let mut t = Table::new(["q_bits", "variant", "c", "epsilon", "log2_cost"]);
    for r in rows {
        t.push(vec![
            r.q_bits.to_string(),
            r.variant.clone(),
            format!("{:.3}", r.c),
            opt(r.epsilon.map(f2)),
            f2(r.log2_cost),
        ]);
    }
    t
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveListing {
    pub curve: StandardCurve,
    pub instance: CurveInstance,
}

pub fn curves_table(curves: &[CurveListing]) -> Table {
    let mut t = Table::new(["curve", "family", "k", "u", "p_bits", "r_bits"]);
    for c in curves {
        t.push(vec![
            c.curve.name.clone(),
            c.curve.family.clone(),
            c.instance.k.to_string(),
            c.instance.u.to_string(),
            c.instance.p_bits.to_string(),
            c.instance.r_bits.to_string(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_tracks_config() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
        b.run.seed = 2;
        assert_ne!(config_hash(&a), config_hash(&b));
    }

    #[test]
    fn renders_all_formats() {
        let mut t = Table::new(["x", "y"]);
        t.push(vec!["1".into(), "a,b".into()]);
        let r = Report::new("demo", &RunConfig::default(), vec![1, 2]);
        assert_eq!(r.render(&t, OutputFormat::Csv).unwrap(), "x,y\n1,\"a,b\"\n");
        let md = r.render(&t, OutputFormat::Markdown).unwrap();
        assert!(md.contains("| x | y |\n| --- | --- |\n| 1 | a,b |\n"));
        assert!(md.contains(&r.config_hash));
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["schema_version"], 1);
        assert_eq!(json["results"][1], 2);
        assert_eq!(json["config"]["run"]["samples"], 25_600);
    }

    #[test]
    fn asymptotic_rows_cover_grid() {
        let rows = asymptotic_rows(&[1024, 3072], &crate::asymptotic::COMPARED).unwrap();
        assert_eq!(rows.len(), 10);
        assert!(asymptotic_rows(&[10], &crate::asymptotic::COMPARED).is_err());
    }
}
