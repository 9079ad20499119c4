//! CSV and JSON files.
//!
//! CSV files start with `# key: value` metadata lines followed by a header
//! row. Floats are written in their shortest round-trip form, so a file read
//! back reproduces the values bit for bit.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Histogram2d, RadialProfile};
use crate::distribution::{Method, NumberDistribution};
use crate::phase_space::{PhaseAmplitude, TrajectoryEnsemble};
use crate::{Error, Result};

pub type Metadata = BTreeMap<String, String>;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_metadata(out: &mut impl Write, path: &Path, meta: &Metadata) -> Result<()> {
    for (k, v) in meta {
        writeln!(out, "# {k}: {}", v.replace('\n', " ")).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Metadata lines at the top of a CSV file.
pub fn read_metadata(path: &Path) -> Result<Metadata> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut meta = Metadata::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let Some(rest) = line.strip_prefix('#') else { break };
        if let Some((k, v)) = rest.trim().split_once(": ") {
            meta.insert(k.to_string(), v.to_string());
        }
    }
    Ok(meta)
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file))
}

fn parse<T: std::str::FromStr>(path: &Path, field: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{}: cannot parse {field} '{s}'", path.display())))
}

/// Ensemble as rows `mode,re,im`.
pub fn write_ensemble_csv(path: &Path, ens: &TrajectoryEnsemble, extra: &Metadata) -> Result<()> {
    let mut out = create(path)?;
    let mut meta = extra.clone();
    meta.insert("seed".into(), ens.seed().to_string());
    meta.insert("count".into(), ens.count().to_string());
    meta.insert("stream_count".into(), ens.stream_count().to_string());
    meta.insert("modes".into(), ens.mode_count().to_string());
    write_metadata(&mut out, path, &meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mode", "re", "im"])?;
    for (m, samples) in ens.modes().iter().enumerate() {
        for a in samples {
            w.write_record([m.to_string(), a.re.to_string(), a.im.to_string()])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_ensemble_csv(path: &Path) -> Result<(TrajectoryEnsemble, Metadata)> {
    let meta = read_metadata(path)?;
    let mut modes: Vec<Vec<PhaseAmplitude>> = Vec::new();
    for rec in csv_reader(path)?.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Config(format!(
                "{}: expected columns mode,re,im",
                path.display()
            )));
        }
        let m: usize = parse(path, "mode", &rec[0])?;
        let a = PhaseAmplitude::try_new(parse(path, "re", &rec[1])?, parse(path, "im", &rec[2])?)?;
        if m >= modes.len() {
            modes.resize(m + 1, Vec::new());
        }
        modes[m].push(a);
    }
    let seed = meta
        .get("seed")
        .map(|s| parse(path, "seed", s))
        .transpose()?
        .unwrap_or(0);
    let count = modes.first().map_or(0, Vec::len);
    let streams = meta
        .get("stream_count")
        .map(|s| parse(path, "stream_count", s))
        .transpose()?
        .unwrap_or_else(|| crate::rng::stream_count(count.max(1)));
    Ok((TrajectoryEnsemble::new(modes, seed, streams)?, meta))
}

/// Distribution as rows `n,p,stderr,method`; `stderr` is empty for exact
/// methods.
pub fn write_distribution_csv(path: &Path, d: &NumberDistribution) -> Result<()> {
    let mut out = create(path)?;
    let mut meta = d.metadata().clone();
    meta.insert("method".into(), d.method().to_string());
    meta.insert("n_max".into(), d.n_max().to_string());
    if let Some(s) = d.samples() {
        meta.insert("samples".into(), s.to_string());
    }
    if let Some(o) = d.overflow() {
        meta.insert("overflow".into(), o.to_string());
    }
    write_metadata(&mut out, path, &meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "p", "stderr", "method"])?;
    for (n, p) in d.probs().iter().enumerate() {
        let se = d.stderr().map(|s| s[n].to_string()).unwrap_or_default();
        w.write_record([n.to_string(), p.to_string(), se, d.method().to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_distribution_csv(path: &Path) -> Result<NumberDistribution> {
    let mut meta = read_metadata(path)?;
    let mut probs = Vec::new();
    let mut stderr = Vec::new();
    let mut method = None;
    for (i, rec) in csv_reader(path)?.records().enumerate() {
        let rec = rec?;
        let n: usize = parse(path, "n", &rec[0])?;
        if n != i {
            return Err(Error::Config(format!(
                "{}: rows must be n = 0, 1, 2, ...",
                path.display()
            )));
        }
        probs.push(parse(path, "p", &rec[1])?);
        if !rec[2].trim().is_empty() {
            stderr.push(parse::<f64>(path, "stderr", &rec[2])?);
        }
        method = Some(rec[3].parse::<Method>()?);
    }
    let method = method.ok_or_else(|| Error::Config(format!("{}: no rows", path.display())))?;
    let mut d = if method.is_stochastic() {
        let samples = meta
            .get("samples")
            .map(|s| parse(path, "samples", s))
            .transpose()?
            .unwrap_or(0);
        NumberDistribution::stochastic(probs, stderr, method, samples)?
    } else {
        NumberDistribution::exact(probs, method)?
    };
    if let Some(o) = meta.get("overflow") {
        d = d.with_overflow(parse(path, "overflow", o)?);
    }
    for k in ["method", "n_max", "samples", "overflow"] {
        meta.remove(k);
    }
    for (k, v) in meta {
        d = d.with_metadata(k, v);
    }
    Ok(d)
}

/// Rows `r,w,l_inh` plus the circle-averaged Wigner function.
pub fn write_profile_csv(path: &Path, p: &RadialProfile, extra: &Metadata) -> Result<()> {
    let mut out = create(path)?;
    let mut meta = extra.clone();
    meta.insert("source".into(), format!("{:?}", p.source).to_lowercase());
    write_metadata(&mut out, path, &meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "w", "l_inh", "angular"])?;
    for i in 0..p.r.len() {
        w.write_record([
            p.r[i].to_string(),
            p.w[i].to_string(),
            p.l_inh[i].to_string(),
            p.angular[i].to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Rows `x,y,density` at cell centres.
pub fn write_histogram_csv(path: &Path, h: &Histogram2d, extra: &Metadata) -> Result<()> {
    let mut out = create(path)?;
    let mut meta = extra.clone();
    meta.insert("cell_width".into(), h.width.to_string());
    meta.insert("samples".into(), h.total.to_string());
    write_metadata(&mut out, path, &meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "density"])?;
    for (x, y, d) in h.rows() {
        w.write_record([x.to_string(), y.to_string(), d.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Plain CSV table with a header row.
pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<String>], extra: &Metadata) -> Result<()> {
    let mut out = create(path)?;
    write_metadata(&mut out, path, extra)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

/// Written next to every command's outputs; rerunning the recorded command
/// and config reproduces them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, seed: Option<u64>, config: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            outputs: Vec::new(),
            warnings: Vec::new(),
        }
    }
}
