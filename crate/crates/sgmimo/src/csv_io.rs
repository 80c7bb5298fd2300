//! CSV tables: `n,f,m,re,im` tensors and `antenna,gain_db` profiles.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every value
//! parses back to the same `f64`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;
use sgmimo_core::{ChannelTensor, Complex, Dims, GainProfile, Scenario};

use crate::{IoError, Result};

pub const TENSOR_HEADER: [&str; 5] = ["n", "f", "m", "re", "im"];
pub const GAIN_HEADER: [&str; 2] = ["antenna", "gain_db"];

#[derive(Debug, Deserialize)]
struct Cell {
    n: usize,
    f: usize,
    m: usize,
    re: f64,
    im: f64,
}

fn csv_err(e: csv::Error) -> IoError {
    IoError::Csv(e.to_string())
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| IoError::io(path, e))
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let headers = rdr.headers().map_err(csv_err)?;
    let found: Vec<&str> = headers.iter().map(str::trim).collect();
    if found != expected {
        return Err(IoError::Csv(format!(
            "expected header '{}', found '{}'",
            expected.join(","),
            found.join(",")
        )));
    }
    Ok(())
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input)
}

pub fn import_csv(path: impl AsRef<Path>, dims: Dims) -> Result<ChannelTensor> {
    read_tensor_csv(open(path.as_ref())?, dims)
}

/// Reads an `n,f,m,re,im` table; every cell of `dims` must appear exactly once.
pub fn read_tensor_csv<R: Read>(input: R, dims: Dims) -> Result<ChannelTensor> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &TENSOR_HEADER)?;
    let mut samples = vec![Complex::new(0.0, 0.0); dims.len()];
    let mut filled = vec![false; dims.len()];
    let headers = rdr.headers().map_err(csv_err)?.clone();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let cell: Cell = rec
            .deserialize(Some(&headers))
            .map_err(|e| IoError::Csv(format!("line {line}: {e}")))?;
        let (n, f, m) = (cell.n, cell.f, cell.m);
        if n >= dims.snapshots || f >= dims.subcarriers || m >= dims.antennas {
            return Err(IoError::CellOutOfRange {
                n,
                f,
                m,
                dims: dims.to_string(),
                line,
            });
        }
        let i = dims.offset(n, f, m);
        if filled[i] {
            return Err(IoError::DuplicateCell { n, f, m, line });
        }
        filled[i] = true;
        samples[i] = Complex::new(cell.re, cell.im);
    }
    if let Some(i) = filled.iter().position(|x| !x) {
        let m = i % dims.antennas;
        let f = (i / dims.antennas) % dims.subcarriers;
        let n = i / (dims.antennas * dims.subcarriers);
        return Err(IoError::MissingCell { n, f, m });
    }
    Ok(ChannelTensor::new(dims, samples)?)
}

/// Shape implied by the largest indices in an `n,f,m,re,im` table.
pub fn infer_dims(path: impl AsRef<Path>) -> Result<Dims> {
    let mut rdr = reader(open(path.as_ref())?);
    check_header(&mut rdr, &TENSOR_HEADER)?;
    let mut max = (0usize, 0usize, 0usize);
    let mut any = false;
    for row in rdr.deserialize::<Cell>() {
        let c = row.map_err(csv_err)?;
        max = (max.0.max(c.n), max.1.max(c.f), max.2.max(c.m));
        any = true;
    }
    if !any {
        return Err(IoError::Csv("table has no rows".into()));
    }
    Ok(Dims::new(max.0 + 1, max.1 + 1, max.2 + 1)?)
}

pub fn write_tensor_csv<W: Write>(tensor: &ChannelTensor, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TENSOR_HEADER).map_err(csv_err)?;
    let dims = tensor.dims();
    for n in 0..dims.snapshots {
        for f in 0..dims.subcarriers {
            for (m, h) in tensor.vector(n, f).iter().enumerate() {
                w.write_record([
                    n.to_string(),
                    f.to_string(),
                    m.to_string(),
                    h.re.to_string(),
                    h.im.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
    }
    w.flush().map_err(|e| IoError::Csv(e.to_string()))
}

pub fn export_csv(tensor: &ChannelTensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| IoError::io(path, e))?;
    write_tensor_csv(tensor, std::io::BufWriter::new(file))
}

#[derive(Debug, Deserialize)]
struct GainRow {
    antenna: usize,
    gain_db: f64,
}

/// Reads an `antenna,gain_db` table with zero-based, consecutive antenna indices.
pub fn read_gain_profile<R: Read>(input: R, scenario: Scenario) -> Result<GainProfile> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &GAIN_HEADER)?;
    let mut values = Vec::new();
    for row in rdr.deserialize::<GainRow>() {
        let row = row.map_err(csv_err)?;
        if row.antenna != values.len() {
            return Err(IoError::Csv(format!(
                "antenna indices must run 0, 1, 2, ...; expected {}, found {}",
                values.len(),
                row.antenna
            )));
        }
        values.push(row.gain_db);
    }
    Ok(GainProfile::from_db(values, scenario)?)
}

pub fn load_gain_profile(path: impl AsRef<Path>, scenario: Scenario) -> Result<GainProfile> {
    read_gain_profile(open(path.as_ref())?, scenario)
}

pub fn write_gain_profile<W: Write>(profile: &GainProfile, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(GAIN_HEADER).map_err(csv_err)?;
    for (m, g) in profile.per_antenna_gain_db.iter().enumerate() {
        w.write_record([m.to_string(), g.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| IoError::Csv(e.to_string()))
}

/// Which header a CSV file starts with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvKind {
    Tensor,
    GainProfile,
}

pub fn sniff(path: impl AsRef<Path>) -> Result<CsvKind> {
    let mut rdr = reader(open(path.as_ref())?);
    let headers = rdr.headers().map_err(csv_err)?;
    let found: Vec<&str> = headers.iter().map(str::trim).collect();
    if found == TENSOR_HEADER {
        Ok(CsvKind::Tensor)
    } else if found == GAIN_HEADER {
        Ok(CsvKind::GainProfile)
    } else {
        Err(IoError::Csv(format!(
            "unrecognized header '{}'",
            found.join(",")
        )))
    }
}
