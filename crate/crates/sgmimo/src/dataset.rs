//! `MMK1` dataset files.
//!
//! ```text
//! MMK1\n
//! {"n":2,"f":1,"m":3,"fc_hz":869525000.0,...}\n
//! <N·F·M × (re: f32 LE, im: f32 LE), row-major [n][f][m]>
//! ```
//!
//! Required header keys: `n`, `f`, `m`, `fc_hz`, `tx_dbm`, `sample_interval_s`,
//! `sample_duration_s`, `array`, `scenario`. Optional: `path`, `k`, `bs_height_m`,
//! `ue_height_m`, `modulation`. Any other key is carried through untouched.

use std::fs;
use std::path::Path;

use serde_json::{Map, Number, Value};
use sgmimo_core::{ChannelTensor, Complex, Dims, MeasurementMeta};

use crate::{IoError, Result};

pub const MAGIC: &str = "MMK1";

const KNOWN_KEYS: &[&str] = &[
    "n",
    "f",
    "m",
    "fc_hz",
    "tx_dbm",
    "sample_interval_s",
    "sample_duration_s",
    "array",
    "scenario",
    "path",
    "k",
    "bs_height_m",
    "ue_height_m",
    "modulation",
];

pub fn load_dataset(path: impl AsRef<Path>) -> Result<(ChannelTensor, MeasurementMeta)> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| IoError::io(path, e))?;
    decode(&bytes)
}

/// Writes `tensor` with `meta`. Samples are narrowed to `f32`; tensors that are
/// already `f32`-exact round-trip bit for bit.
pub fn save_dataset(
    tensor: &ChannelTensor,
    meta: &MeasurementMeta,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode(tensor, meta)?;
    fs::write(path, bytes).map_err(|e| IoError::io(path, e))
}

fn split_line(bytes: &[u8]) -> Option<(&[u8], &[u8])> {
    let i = bytes.iter().position(|&b| b == b'\n')?;
    Some((&bytes[..i], &bytes[i + 1..]))
}

pub fn decode(bytes: &[u8]) -> Result<(ChannelTensor, MeasurementMeta)> {
    let (magic, rest) = split_line(bytes).ok_or_else(|| IoError::BadMagic {
        found: String::from_utf8_lossy(&bytes[..bytes.len().min(8)]).into_owned(),
    })?;
    if magic != MAGIC.as_bytes() {
        return Err(IoError::BadMagic {
            found: String::from_utf8_lossy(magic).into_owned(),
        });
    }
    let (header, payload) = split_line(rest)
        .ok_or_else(|| IoError::HeaderJson("missing header line terminator".into()))?;
    let header = std::str::from_utf8(header).map_err(|e| IoError::HeaderJson(e.to_string()))?;
    let obj: Map<String, Value> = match serde_json::from_str(header) {
        Ok(Value::Object(o)) => o,
        Ok(_) => return Err(IoError::HeaderJson("header must be a JSON object".into())),
        Err(e) => return Err(IoError::HeaderJson(e.to_string())),
    };
    let meta = meta_from_header(&obj)?;
    let dims = meta.dims()?;

    let expected = dims.len() * 8;
    if payload.len() != expected {
        return Err(IoError::SizeMismatch {
            expected,
            actual: payload.len(),
        });
    }
    let samples = payload
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex::new(re as f64, im as f64)
        })
        .collect();
    let tensor = ChannelTensor::new(dims, samples)?.with_meta(meta.clone());
    Ok((tensor, meta))
}

pub fn encode(tensor: &ChannelTensor, meta: &MeasurementMeta) -> Result<Vec<u8>> {
    meta.validate()?;
    let dims = tensor.dims();
    if meta.dims()? != dims {
        return Err(IoError::key(
            "n/f/m",
            format!(
                "metadata shape {} differs from tensor shape {}",
                meta.dims()?,
                dims
            ),
        ));
    }
    let header = serde_json::to_string(&Value::Object(header_from_meta(meta)))
        .map_err(|e| IoError::HeaderJson(e.to_string()))?;

    let mut out = Vec::with_capacity(MAGIC.len() + header.len() + 2 + dims.len() * 8);
    out.extend_from_slice(MAGIC.as_bytes());
    out.push(b'\n');
    out.extend_from_slice(header.as_bytes());
    out.push(b'\n');
    for (i, c) in tensor.samples().iter().enumerate() {
        let (re, im) = (c.re as f32, c.im as f32);
        if !(re.is_finite() && im.is_finite()) {
            let m = i % dims.antennas;
            let f = (i / dims.antennas) % dims.subcarriers;
            let n = i / (dims.antennas * dims.subcarriers);
            return Err(IoError::NotRepresentable { n, f, m });
        }
        out.extend_from_slice(&re.to_le_bytes());
        out.extend_from_slice(&im.to_le_bytes());
    }
    Ok(out)
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| IoError::key(key, "missing"))
}

fn count(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    get(obj, key)?
        .as_u64()
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| IoError::key(key, "expected a non-negative integer"))
}

fn number(obj: &Map<String, Value>, key: &str) -> Result<f64> {
    get(obj, key)?
        .as_f64()
        .ok_or_else(|| IoError::key(key, "expected a number"))
}

fn text(obj: &Map<String, Value>, key: &str) -> Result<String> {
    get(obj, key)?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| IoError::key(key, "expected a string"))
}

fn optional<T>(
    obj: &Map<String, Value>,
    key: &str,
    read: fn(&Map<String, Value>, &str) -> Result<T>,
) -> Result<Option<T>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => read(obj, key).map(Some),
    }
}

fn positive(obj: &Map<String, Value>, key: &str) -> Result<f64> {
    let v = number(obj, key)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(IoError::key(key, format!("must be positive, got {v}")))
    }
}

fn meta_from_header(obj: &Map<String, Value>) -> Result<MeasurementMeta> {
    let n = count(obj, "n")?;
    let f = count(obj, "f")?;
    let m = count(obj, "m")?;
    for (key, v) in [("n", n), ("f", f), ("m", m)] {
        if v == 0 {
            return Err(IoError::key(key, "must be at least 1"));
        }
    }
    let dims = Dims::new(n, f, m)?;
    let mut meta = MeasurementMeta::for_dims(dims);
    meta.carrier_freq_hz = positive(obj, "fc_hz")?;
    meta.tx_power_dbm = number(obj, "tx_dbm")?;
    meta.sample_interval_s = positive(obj, "sample_interval_s")?;
    meta.sample_duration_s = positive(obj, "sample_duration_s")?;
    meta.array_label = text(obj, "array")?;
    meta.scenario = text(obj, "scenario")?
        .parse()
        .map_err(|e: sgmimo_core::Error| IoError::key("scenario", e.to_string()))?;
    meta.path_label = optional(obj, "path", text)?;
    if let Some(k) = optional(obj, "k", count)? {
        if k == 0 {
            return Err(IoError::key("k", "must be at least 1"));
        }
        meta.n_nodes = k;
    }
    if let Some(h) = optional(obj, "bs_height_m", number)? {
        meta.bs_height_m = h;
    }
    if let Some(h) = optional(obj, "ue_height_m", number)? {
        meta.ue_height_m = h;
    }
    if let Some(s) = optional(obj, "modulation", text)? {
        meta.modulation = s;
    }
    meta.extra = obj
        .iter()
        .filter(|(k, _)| !KNOWN_KEYS.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.to_string()))
        .collect();
    Ok(meta)
}

fn float(v: f64) -> Value {
    Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn header_from_meta(meta: &MeasurementMeta) -> Map<String, Value> {
    let mut obj = Map::new();
    for (k, raw) in &meta.extra {
        let v = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.clone()));
        obj.insert(k.clone(), v);
    }
    obj.insert("n".into(), meta.n_snapshots.into());
    obj.insert("f".into(), meta.n_subcarriers_used.into());
    obj.insert("m".into(), meta.n_bs_antennas.into());
    obj.insert("fc_hz".into(), float(meta.carrier_freq_hz));
    obj.insert("tx_dbm".into(), float(meta.tx_power_dbm));
    obj.insert("sample_interval_s".into(), float(meta.sample_interval_s));
    obj.insert("sample_duration_s".into(), float(meta.sample_duration_s));
    obj.insert("array".into(), meta.array_label.clone().into());
    obj.insert("scenario".into(), meta.scenario.as_str().into());
    if let Some(p) = &meta.path_label {
        obj.insert("path".into(), p.clone().into());
    }
    obj.insert("k".into(), meta.n_nodes.into());
    obj.insert("bs_height_m".into(), float(meta.bs_height_m));
    obj.insert("ue_height_m".into(), float(meta.ue_height_m));
    obj.insert("modulation".into(), meta.modulation.clone().into());
    obj
}
