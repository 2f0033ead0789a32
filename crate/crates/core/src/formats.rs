//! On-disk formats: CSV tables, JSON documents with fixed float formatting,
//! and the flat binary layout for field samples. Files are written atomically.

use std::io::{self, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::boost::ScanRow;
use crate::error::{Result, SolitonError};
use crate::evolver::DiagnosticRecord;
use crate::functionals::FunctionalReport;
use crate::grid::{FieldSample, GridSpec};
use crate::radial::{SolitaryWave, TailFit};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Pretty JSON whose floats always carry 17 significant digits.
/// Non-finite floats become `null`.
struct PreciseFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for PreciseFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, PreciseFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| SolitonError::Format(e.to_string()))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| SolitonError::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json_string(value)?.as_bytes())
}

fn csv_line(fields: impl IntoIterator<Item = f64>) -> String {
    let mut line = fields
        .into_iter()
        .map(fmt_f64)
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

/// Columns `r,R,dR,d2R`.
pub fn profile_csv(wave: &SolitaryWave) -> String {
    let p = &wave.profile;
    let mut out = String::from("r,R,dR,d2R\n");
    for i in 0..p.len() {
        out.push_str(&csv_line([
            p.radius(i),
            p.values[i],
            p.derivative[i],
            p.second[i],
        ]));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileSidecar<'a> {
    pub n: usize,
    pub k: u32,
    pub omega: f64,
    pub shoot_param: f64,
    pub delta: f64,
    pub node_count: usize,
    pub step: f64,
    pub points: usize,
    pub max_amplitude: f64,
    pub tail: Option<&'a TailFit>,
}

impl<'a> ProfileSidecar<'a> {
    pub fn new(wave: &'a SolitaryWave) -> Self {
        Self {
            n: wave.n,
            k: wave.k,
            omega: wave.omega,
            shoot_param: wave.profile.shoot_param,
            delta: wave.delta(),
            node_count: wave.profile.node_count,
            step: wave.profile.step,
            points: wave.profile.len(),
            max_amplitude: wave.profile.max_abs(),
            tail: wave.profile.tail.as_ref(),
        }
    }
}

pub fn report_json(report: &FunctionalReport) -> Result<String> {
    to_json_string(report)
}

fn axis_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("{prefix}{j}")).collect()
}

/// Columns `v[,v1..vn],E_meas,P1_meas..,E_pred,P1_pred..,relE,relP`; the
/// component columns of `v` appear only for `n > 1`.
pub fn scan_csv(n: usize, rows: &[ScanRow]) -> String {
    let mut header = vec!["v".to_string()];
    if n > 1 {
        header.extend(axis_names("v", n));
    }
    header.push("E_meas".into());
    header.extend(axis_names("P", n).into_iter().map(|p| p + "_meas"));
    header.push("E_pred".into());
    header.extend(axis_names("P", n).into_iter().map(|p| p + "_pred"));
    header.push("relE".into());
    header.push("relP".into());
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        // Signed speed in one dimension so the direction survives.
        let mut fields = vec![if n == 1 { row.velocity[0] } else { row.speed }];
        if n > 1 {
            fields.extend(&row.velocity);
        }
        fields.push(row.energy_measured);
        fields.extend(&row.momentum_measured);
        fields.push(row.energy_predicted);
        fields.extend(&row.momentum_predicted);
        fields.push(row.rel_err_e);
        fields.push(row.rel_err_p);
        out.push_str(&csv_line(fields));
    }
    out
}

/// Columns `time,E,P1..Pn,X1..Xn`.
pub fn diagnostics_csv(n: usize, records: &[DiagnosticRecord]) -> String {
    let mut header = vec!["time".to_string(), "E".to_string()];
    header.extend(axis_names("P", n));
    header.extend(axis_names("X", n));
    let mut out = header.join(",");
    out.push('\n');
    for r in records {
        let mut fields = vec![r.time, r.energy];
        fields.extend(&r.momentum);
        fields.extend(&r.center_of_energy);
        out.push_str(&csv_line(fields));
    }
    out
}

/// Little-endian layout: `u64 n`, `u64 N_j` per axis, `f64 L_j` per axis,
/// `f64 time`, then `ψ` as interleaved re/im pairs followed by `ψ̇`.
pub fn encode_sample(sample: &FieldSample) -> Vec<u8> {
    let g = &sample.grid;
    let mut out = Vec::with_capacity(8 * (2 + 2 * g.n + 4 * g.len()));
    out.extend_from_slice(&(g.n as u64).to_le_bytes());
    for &p in &g.points {
        out.extend_from_slice(&(p as u64).to_le_bytes());
    }
    for &l in &g.extent {
        out.extend_from_slice(&l.to_le_bytes());
    }
    out.extend_from_slice(&sample.time.to_le_bytes());
    for z in sample.psi.iter().chain(&sample.psi_dot) {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode_sample(bytes: &[u8]) -> Result<FieldSample> {
    let mut reader = bytes;
    let mut word = || -> Result<[u8; 8]> {
        let mut buf = [0u8; 8];
        reader
            .read_exact(&mut buf)
            .map_err(|_| SolitonError::Format("field sample truncated".into()))?;
        Ok(buf)
    };
    let n = u64::from_le_bytes(word()?) as usize;
    if n == 0 || n > 16 {
        return Err(SolitonError::Format(format!("implausible dimension {n}")));
    }
    let points = (0..n)
        .map(|_| Ok(u64::from_le_bytes(word()?) as usize))
        .collect::<Result<Vec<_>>>()?;
    let extent = (0..n)
        .map(|_| Ok(f64::from_le_bytes(word()?)))
        .collect::<Result<Vec<_>>>()?;
    let time = f64::from_le_bytes(word()?);
    let grid = GridSpec::new(extent, points)?;
    let len = grid.len();
    let expected = 8 * (2 + 2 * n + 4 * len);
    if bytes.len() != expected {
        return Err(SolitonError::Format(format!(
            "field sample has {} bytes, header implies {expected}",
            bytes.len()
        )));
    }
    let mut values = Vec::with_capacity(2 * len);
    for _ in 0..2 * len {
        let re = f64::from_le_bytes(word()?);
        let im = f64::from_le_bytes(word()?);
        values.push(Complex64::new(re, im));
    }
    let psi_dot = values.split_off(len);
    FieldSample::new(grid, time, values, psi_dot, "decoded")
}

pub fn write_sample(path: &Path, sample: &FieldSample) -> Result<()> {
    write_atomic(path, &encode_sample(sample))
}

pub fn read_sample(path: &Path) -> Result<FieldSample> {
    decode_sample(&std::fs::read(path)?)
}
