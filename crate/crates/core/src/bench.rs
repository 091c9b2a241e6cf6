//! Experiment runner and result tables.
//!
//! Three experiment shapes are supported: one cipher size across several
//! images, one cipher size across several image dimensions, and several
//! cipher sizes in the same image. Every cell embeds a seeded pseudorandom
//! cipher with one method and records PSNR/MSE against the cover.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::bytes_to_bits;
use crate::error::{Result, StegoError};
use crate::image::RgbImage;
use crate::methods::{Codec, MethodId, StegoKey};
use crate::metrics::{psnr, CmaxMode};

/// One "KB" of cipher.
pub const KB: usize = 1024;

const CIPHER_STREAM: u64 = 0;
const KEY_STREAM: u64 = 1;

/// Deterministic pseudorandom cipher of `size_kb * 1024` bytes. A larger
/// size with the same seed extends the smaller one.
pub fn generate_cipher(seed: u64, size_kb: u32) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(CIPHER_STREAM);
    let mut buf = vec![0u8; size_kb as usize * KB];
    rng.fill_bytes(&mut buf);
    buf
}

/// 128-bit key derived from the seed, used when no key is supplied.
pub fn default_key(seed: u64) -> StegoKey {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(KEY_STREAM);
    let mut buf = [0u8; 16];
    rng.fill_bytes(&mut buf);
    StegoKey::from_bytes(&buf).expect("non-empty key")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentMode {
    /// Same cipher, different images of the same dimensions.
    SameCipherManyImages,
    /// Same cipher, images of different dimensions.
    SameCipherManySizes,
    /// Several cipher sizes in one image.
    VariableCipherOneImage,
}

impl ExperimentMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentMode::SameCipherManyImages => "images",
            ExperimentMode::SameCipherManySizes => "sizes",
            ExperimentMode::VariableCipherOneImage => "cipher",
        }
    }

    pub fn default_sizes_kb(self) -> Vec<u32> {
        match self {
            ExperimentMode::VariableCipherOneImage => vec![2, 4, 6, 8],
            _ => vec![2],
        }
    }

    fn row_header(self) -> &'static str {
        match self {
            ExperimentMode::SameCipherManyImages => "Image Name",
            ExperimentMode::SameCipherManySizes => "Image Dimensions",
            ExperimentMode::VariableCipherOneImage => "Image / Cipher Size",
        }
    }
}

impl fmt::Display for ExperimentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentMode {
    type Err = StegoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "images" => Ok(ExperimentMode::SameCipherManyImages),
            "sizes" => Ok(ExperimentMode::SameCipherManySizes),
            "cipher" => Ok(ExperimentMode::VariableCipherOneImage),
            other => Err(StegoError::InvalidExperiment(format!(
                "unknown mode {other:?}"
            ))),
        }
    }
}

/// A labelled cover image.
#[derive(Clone, Debug)]
pub struct BenchImage {
    pub label: String,
    pub image: RgbImage,
}

impl BenchImage {
    pub fn new(label: impl Into<String>, image: RgbImage) -> Self {
        Self {
            label: label.into(),
            image,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub mode: ExperimentMode,
    pub images: Vec<BenchImage>,
    pub cipher_sizes_kb: Vec<u32>,
    pub methods: Vec<MethodId>,
    pub seed: u64,
    /// Key for the keyed method; derived from `seed` when absent.
    pub key: Option<StegoKey>,
    pub cmax_mode: CmaxMode,
}

impl ExperimentSpec {
    pub fn new(mode: ExperimentMode, images: Vec<BenchImage>) -> Self {
        Self {
            mode,
            images,
            cipher_sizes_kb: mode.default_sizes_kb(),
            methods: MethodId::ALL.to_vec(),
            seed: 0,
            key: None,
            cmax_mode: CmaxMode::Fixed255,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.images.is_empty() {
            return Err(StegoError::InvalidExperiment("no images given".into()));
        }
        match self.mode {
            ExperimentMode::VariableCipherOneImage => {
                if self.cipher_sizes_kb.is_empty() {
                    return Err(StegoError::InvalidExperiment(
                        "no cipher sizes given".into(),
                    ));
                }
            }
            _ => {
                if self.cipher_sizes_kb.len() != 1 {
                    return Err(StegoError::InvalidExperiment(format!(
                        "mode {} embeds one cipher size, got {}",
                        self.mode,
                        self.cipher_sizes_kb.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// How to schedule the independent cells of an experiment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Ok { psnr_db: f64, mse: f64 },
    Failed(String),
}

impl Cell {
    pub fn psnr_db(&self) -> Option<f64> {
        match self {
            Cell::Ok { psnr_db, .. } => Some(*psnr_db),
            Cell::Failed(_) => None,
        }
    }
}

/// Rows × methods grid of PSNR/MSE results.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub row_header: String,
    pub rows: Vec<String>,
    pub methods: Vec<MethodId>,
    cells: BTreeMap<(usize, MethodId), Cell>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TableFormat {
    #[default]
    Csv,
    Markdown,
}

impl FromStr for TableFormat {
    type Err = StegoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "md" | "markdown" => Ok(TableFormat::Markdown),
            other => Err(StegoError::InvalidExperiment(format!(
                "unknown format {other:?}"
            ))),
        }
    }
}

fn canonical_methods(methods: &[MethodId]) -> Vec<MethodId> {
    MethodId::ALL
        .into_iter()
        .filter(|m| methods.contains(m))
        .collect()
}

fn format_f64(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        v.to_string()
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    if s == "inf" {
        return Ok(f64::INFINITY);
    }
    s.parse()
        .map_err(|_| StegoError::MalformedTable(format!("bad number {s:?}")))
}

impl ResultTable {
    pub fn new(row_header: impl Into<String>, rows: Vec<String>, methods: &[MethodId]) -> Self {
        Self {
            row_header: row_header.into(),
            rows,
            methods: canonical_methods(methods),
            cells: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, row: usize, method: MethodId, cell: Cell) {
        self.cells.insert((row, method), cell);
    }

    pub fn cell(&self, row: usize, method: MethodId) -> Option<&Cell> {
        self.cells.get(&(row, method))
    }

    /// PSNR values of one method, top to bottom; `None` for failed cells.
    pub fn column(&self, method: MethodId) -> Vec<Option<f64>> {
        (0..self.rows.len())
            .map(|r| self.cell(r, method).and_then(Cell::psnr_db))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.methods.is_empty() || self.rows.is_empty()
    }

    pub fn render(&self, format: TableFormat) -> String {
        match format {
            TableFormat::Csv => self.to_csv(),
            TableFormat::Markdown => self.to_markdown(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.row_header.clone()];
        for m in &self.methods {
            header.push(format!("{m}_psnr_db"));
            header.push(format!("{m}_mse"));
        }
        w.write_record(&header).expect("in-memory write");
        for (r, label) in self.rows.iter().enumerate() {
            let mut record = vec![label.clone()];
            for &m in &self.methods {
                match self.cell(r, m) {
                    Some(Cell::Ok { psnr_db, mse }) => {
                        record.push(format_f64(*psnr_db));
                        record.push(format_f64(*mse));
                    }
                    Some(Cell::Failed(msg)) => {
                        record.push(format!("FAILED: {msg}"));
                        record.push(String::new());
                    }
                    None => {
                        record.push(String::new());
                        record.push(String::new());
                    }
                }
            }
            w.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let malformed = |e: csv::Error| StegoError::MalformedTable(e.to_string());
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header = rdr.headers().map_err(malformed)?.clone();
        let mut fields = header.iter();
        let row_header = fields
            .next()
            .ok_or_else(|| StegoError::MalformedTable("empty header".into()))?
            .to_string();
        let rest: Vec<&str> = fields.collect();
        if !rest.len().is_multiple_of(2) {
            return Err(StegoError::MalformedTable(
                "odd number of method columns".into(),
            ));
        }
        let methods = rest
            .chunks(2)
            .map(|pair| {
                let name = pair[0].strip_suffix("_psnr_db").ok_or_else(|| {
                    StegoError::MalformedTable(format!("bad column {:?}", pair[0]))
                })?;
                name.parse::<MethodId>()
            })
            .collect::<Result<Vec<_>>>()?;

        let mut table = ResultTable {
            row_header,
            rows: Vec::new(),
            methods: methods.clone(),
            cells: BTreeMap::new(),
        };
        for (r, record) in rdr.records().enumerate() {
            let record = record.map_err(malformed)?;
            table.rows.push(record[0].to_string());
            for (i, &m) in methods.iter().enumerate() {
                let psnr = &record[1 + 2 * i];
                let mse = &record[2 + 2 * i];
                if psnr.is_empty() {
                    continue;
                }
                let cell = match psnr.strip_prefix("FAILED: ") {
                    Some(msg) => Cell::Failed(msg.to_string()),
                    None => Cell::Ok {
                        psnr_db: parse_f64(psnr)?,
                        mse: parse_f64(mse)?,
                    },
                };
                table.insert(r, m, cell);
            }
        }
        Ok(table)
    }

    /// Aligned markdown table of PSNR values, one column per method.
    pub fn to_markdown(&self) -> String {
        let mut grid: Vec<Vec<String>> = Vec::with_capacity(self.rows.len() + 1);
        let mut header = vec![self.row_header.clone()];
        header.extend(
            self.methods
                .iter()
                .map(|m| format!("{} PSNR (dB)", m.title())),
        );
        grid.push(header);
        for (r, label) in self.rows.iter().enumerate() {
            let mut line = vec![label.clone()];
            for &m in &self.methods {
                line.push(match self.cell(r, m) {
                    Some(Cell::Ok { psnr_db, .. }) => crate::metrics::format_psnr(*psnr_db),
                    Some(Cell::Failed(_)) => "failed".into(),
                    None => String::new(),
                });
            }
            grid.push(line);
        }
        let widths: Vec<usize> = (0..grid[0].len())
            .map(|c| {
                grid.iter()
                    .map(|row| row[c].chars().count())
                    .max()
                    .unwrap_or(0)
                    .max(3)
            })
            .collect();

        let mut out = String::new();
        let write_row = |out: &mut String, row: &[String]| {
            out.push('|');
            for (cell, &w) in row.iter().zip(&widths) {
                let _ = write!(out, " {cell:<w$} |");
            }
            out.push('\n');
        };
        write_row(&mut out, &grid[0]);
        out.push('|');
        for (c, &w) in widths.iter().enumerate() {
            let dashes = "-".repeat(w);
            if c == 0 {
                let _ = write!(out, " {dashes} |");
            } else {
                let _ = write!(out, " {}: |", &dashes[1..]);
            }
        }
        out.push('\n');
        for row in &grid[1..] {
            write_row(&mut out, row);
        }
        out
    }
}

struct Job<'a> {
    row: usize,
    method: MethodId,
    image: &'a RgbImage,
    size_kb: u32,
}

fn run_cell(job: &Job<'_>, spec: &ExperimentSpec, key: &StegoKey) -> Cell {
    let outcome = (|| {
        let key = job.method.requires_key().then_some(key);
        let codec = Codec::new(job.method, key)?;
        let bits = bytes_to_bits(&generate_cipher(spec.seed, job.size_kb));
        let report = codec.embed_bits(job.image, &bits)?;
        psnr(job.image, &report.stego, spec.cmax_mode)
    })();
    match outcome {
        Ok(r) => Cell::Ok {
            psnr_db: r.psnr_db,
            mse: r.mse,
        },
        Err(e) => Cell::Failed(e.to_string()),
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ResultTable> {
    run_experiment_with(spec, Execution::default())
}

/// Runs every (row, method) cell. The cipher is embedded as raw bits with
/// no length header, since only distortion is measured. Cell failures are
/// recorded in the table; only a malformed spec is an error.
pub fn run_experiment_with(spec: &ExperimentSpec, execution: Execution) -> Result<ResultTable> {
    spec.validate()?;
    let mut rows = Vec::new();
    let mut plan: Vec<(&RgbImage, u32)> = Vec::new();
    for img in &spec.images {
        match spec.mode {
            ExperimentMode::SameCipherManyImages => {
                rows.push(img.label.clone());
                plan.push((&img.image, spec.cipher_sizes_kb[0]));
            }
            ExperimentMode::SameCipherManySizes => {
                rows.push(format!("{}x{}", img.image.width(), img.image.height()));
                plan.push((&img.image, spec.cipher_sizes_kb[0]));
            }
            ExperimentMode::VariableCipherOneImage => {
                for &kb in &spec.cipher_sizes_kb {
                    rows.push(format!("{} {} KB", img.label, kb));
                    plan.push((&img.image, kb));
                }
            }
        }
    }
    let mut table = ResultTable::new(spec.mode.row_header(), rows, &spec.methods);
    let jobs: Vec<Job<'_>> = plan
        .iter()
        .enumerate()
        .flat_map(|(row, &(image, size_kb))| {
            table.methods.iter().map(move |&method| Job {
                row,
                method,
                image,
                size_kb,
            })
        })
        .collect();

    let key = spec.key.clone().unwrap_or_else(|| default_key(spec.seed));
    let results: Vec<(usize, MethodId, Cell)> = match execution {
        Execution::Serial => jobs
            .iter()
            .map(|j| (j.row, j.method, run_cell(j, spec, &key)))
            .collect(),
        Execution::Parallel => jobs
            .par_iter()
            .map(|j| (j.row, j.method, run_cell(j, spec, &key)))
            .collect(),
    };
    for (row, method, cell) in results {
        table.insert(row, method, cell);
    }
    Ok(table)
}
