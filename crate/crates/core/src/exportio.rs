//! File formats: field CSV, PGM amplitude rasters, PPM phase rasters and
//! JSON reports.
//!
//! Floating-point numbers are always written with 17 significant digits so
//! that every value reads back bit-for-bit. Non-finite numbers are refused.
//! Rasters put the largest `y` on the top row.

use std::f64::consts::{PI, TAU};
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fockspace::{Mode, PhotonDistribution, SqueezeConfig};
use crate::modeconverter::{AuditReport, DiscrepancyDoc};
use crate::quadfield::{amplitude_map, ComplexField, GridSpec, LgOptions, PhaseMap, Provenance};
use crate::vortexdetect::DetectionParams;

pub const CSV_HEADER: &str = "x,y,re,im";

/// Relative slack allowed between a CSV coordinate and the grid it implies.
const COORD_TOLERANCE: f64 = 1e-9;

#[inline]
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn check_finite(values: impl IntoIterator<Item = f64>, what: &str) -> Result<()> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// CSV rows for samples on the square grid `coords x coords`, row-major with
/// `y` as the outer index.
fn write_samples_csv<W: Write>(mut out: W, coords: &[f64], values: &[Complex64]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let n = coords.len();
    for (i, &y) in coords.iter().enumerate() {
        let ys = fmt17(y);
        for (j, &x) in coords.iter().enumerate() {
            let v = values[i * n + j];
            writeln!(out, "{},{},{},{}", fmt17(x), ys, fmt17(v.re), fmt17(v.im))?;
        }
    }
    Ok(())
}

pub fn write_field_csv(field: &ComplexField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    check_finite(field.values().iter().flat_map(|z| [z.re, z.im]), "field samples")?;
    let mut w = create(path)?;
    write_samples_csv(&mut w, &field.grid().coords(), field.values()).map_err(|e| Error::io(path, e))?;
    finish(w, path)
}

/// Parse a field written by [`write_field_csv`].
///
/// The grid is recovered from the row count and the first coordinate.
/// Any line that fails to parse, has the wrong arity, holds a non-finite
/// number or sits off the implied grid is reported by its 1-based number.
pub fn read_field_csv(path: impl AsRef<Path>) -> Result<ComplexField> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };

    let mut rows: Vec<[f64; 4]> = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if lineno == 1 {
            if line.trim_end() != CSV_HEADER {
                return Err(bad(1, format!("expected header {CSV_HEADER:?}, found {line:?}")));
            }
            continue;
        }
        let mut row = [0.0; 4];
        let mut fields = line.trim_end_matches('\r').split(',');
        for (k, slot) in row.iter_mut().enumerate() {
            let text = fields
                .next()
                .ok_or_else(|| bad(lineno, format!("expected 4 fields, found {k}")))?;
            *slot = text
                .trim()
                .parse::<f64>()
                .map_err(|e| bad(lineno, format!("field {}: {e} ({text:?})", k + 1)))?;
            if !slot.is_finite() {
                return Err(bad(lineno, format!("non-finite value {text:?}")));
            }
        }
        if fields.next().is_some() {
            return Err(bad(lineno, "more than 4 fields".into()));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(bad(1, "no data rows".into()));
    }

    let res = (rows.len() as f64).sqrt().round() as usize;
    if res * res != rows.len() {
        return Err(bad(rows.len() + 2, format!("{} rows do not form a square grid", rows.len())));
    }
    let extent = -rows[0][0];
    let grid = GridSpec::new(extent, res).map_err(|e| bad(2, e.to_string()))?;
    let slack = COORD_TOLERANCE * extent;
    let mut values = Vec::with_capacity(rows.len());
    for (k, row) in rows.iter().enumerate() {
        let (i, j) = (k / res, k % res);
        if (row[0] - grid.coord(j)).abs() > slack || (row[1] - grid.coord(i)).abs() > slack {
            return Err(bad(
                k + 2,
                format!(
                    "coordinate ({}, {}) is off the {res}x{res} grid of extent {extent}",
                    row[0], row[1]
                ),
            ));
        }
        values.push(Complex64::new(row[2], row[3]));
    }
    ComplexField::from_values(grid, values, Provenance::Synthetic)
}

/// Rows of a `width x width` raster, largest `y` first.
fn rows_top_down(samples: &[f64], width: usize) -> impl Iterator<Item = &[f64]> {
    samples.chunks(width).rev()
}

fn square_width(len: usize) -> Result<usize> {
    let w = (len as f64).sqrt().round() as usize;
    if w * w != len || w == 0 {
        return Err(Error::InvalidGrid(format!("{len} samples do not form a square raster")));
    }
    Ok(w)
}

/// Binary PGM bytes for a square raster, linear min to 0 and max to 255.
pub fn encode_pgm(samples: &[f64]) -> Result<Vec<u8>> {
    let width = square_width(samples.len())?;
    check_finite(samples.iter().copied(), "amplitude raster")?;
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let mut out = format!("P5\n{width} {width}\n255\n").into_bytes();
    out.reserve(samples.len());
    let span = hi - lo;
    for row in rows_top_down(samples, width) {
        out.extend(row.iter().map(|&v| {
            if span > 0.0 {
                (255.0 * (v - lo) / span).round() as u8
            } else {
                0
            }
        }));
    }
    Ok(out)
}

pub fn write_pgm_amplitude(field: &ComplexField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_pgm(&amplitude_map(field))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Full-saturation, full-value hue to RGB. `hue` in turns.
pub fn hue_to_rgb(hue: f64) -> [u8; 3] {
    let h6 = hue.rem_euclid(1.0) * 6.0;
    let sector = (h6.floor() as usize).min(5);
    let f = h6 - sector as f64;
    let (r, g, b) = match sector {
        0 => (1.0, f, 0.0),
        1 => (1.0 - f, 1.0, 0.0),
        2 => (0.0, 1.0, f),
        3 => (0.0, 1.0 - f, 1.0),
        4 => (f, 0.0, 1.0),
        _ => (1.0, 0.0, 1.0 - f),
    };
    let q = |c: f64| (255.0 * c).round() as u8;
    [q(r), q(g), q(b)]
}

/// Binary PPM bytes for a square raster of phases in `(-pi, pi]`.
pub fn encode_ppm(phase: &[f64]) -> Result<Vec<u8>> {
    let width = square_width(phase.len())?;
    check_finite(phase.iter().copied(), "phase raster")?;
    if let Some(p) = phase.iter().find(|&&p| !(p > -PI && p <= PI)) {
        return Err(Error::Domain(format!("phase {p} outside (-pi, pi]")));
    }
    let mut out = format!("P6\n{width} {width}\n255\n").into_bytes();
    out.reserve(3 * phase.len());
    for row in rows_top_down(phase, width) {
        for &p in row {
            out.extend(hue_to_rgb((p + PI) / TAU));
        }
    }
    Ok(out)
}

pub fn write_ppm_phase(phase: &PhaseMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_ppm(phase.values())?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// serde_json formatter printing every float with 17 significant digits.
///
/// serde_json routes NaN and infinities to `write_null`, so `null` is
/// refused outright; reports leave absent values out instead.
#[derive(Default)]
struct Fixed17;

impl serde_json::ser::Formatter for Fixed17 {
    fn write_null<W: ?Sized + Write>(&mut self, _writer: &mut W) -> io::Result<()> {
        Err(io::Error::new(io::ErrorKind::InvalidData, "non-finite number"))
    }

    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if !value.is_finite() {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "non-finite number"));
        }
        writer.write_all(fmt17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serialize to JSON text with the fixed float format.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17);
    value.serialize(&mut ser).map_err(|e| {
        if e.is_io() {
            Error::NonFinite("JSON report".into())
        } else {
            Error::Json(e)
        }
    })?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Write any report as JSON: [`VortexReport`](crate::vortexdetect::VortexReport),
/// [`AuditReport`], [`PhotonDistribution`], [`RunManifest`] or a caller doc.
pub fn write_json_report<T: Serialize + ?Sized>(report: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = to_json_string(report)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

impl Serialize for AuditReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let docs: Vec<DiscrepancyDoc> = self.discrepancies.iter().map(DiscrepancyDoc::from).collect();
        let mut st = s.serialize_struct("AuditReport", 5)?;
        st.serialize_field("config", &self.config)?;
        st.serialize_field("max_amplitude_deviation", &self.max_amplitude_deviation)?;
        st.serialize_field("max_probability_deviation", &self.max_probability_deviation)?;
        st.serialize_field("discrepancies", &docs)?;
        st.serialize_field("notes", &self.notes)?;
        st.end()
    }
}

#[derive(Serialize)]
struct JointEntry {
    n1: usize,
    n2: usize,
    p: f64,
}

impl Serialize for PhotonDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let joint: Vec<JointEntry> = self
            .iter_joint()
            .map(|(n1, n2, p)| JointEntry { n1, n2, p })
            .collect();
        let mut st = s.serialize_struct("PhotonDistribution", 5)?;
        st.serialize_field("truncation", &self.truncation())?;
        st.serialize_field("joint", &joint)?;
        st.serialize_field("marginal_total", self.marginal_total())?;
        st.serialize_field("marginal_a", &self.mode_marginal(Mode::A))?;
        st.serialize_field("marginal_b", &self.mode_marginal(Mode::B))?;
        st.end()
    }
}

/// What a file listed in a manifest contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContentKind {
    FieldCsv,
    AmplitudePgm,
    PhasePpm,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputEntry {
    pub filename: String,
    pub kind: ContentKind,
    pub bytes: u64,
}

/// Parameters of a run as recorded in its manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub squeeze: Option<SqueezeConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lg: Option<LgOptions>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
}

impl RunConfig {
    pub fn new(command: impl Into<String>) -> Self {
        RunConfig {
            command: command.into(),
            squeeze: None,
            grid: None,
            detection: None,
            field_source: None,
            lg: None,
            input: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: RunConfig,
    pub outputs: Vec<OutputEntry>,
    /// UTC, RFC 3339.
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(config: RunConfig) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            outputs: Vec::new(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    /// List a file that has already been written; its size is read from disk.
    pub fn record(&mut self, path: impl AsRef<Path>, kind: ContentKind) -> Result<()> {
        let path = path.as_ref();
        let bytes = fs::metadata(path).map_err(|e| Error::io(path, e))?.len();
        let filename = path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.outputs.push(OutputEntry { filename, kind, bytes });
        Ok(())
    }
}

/// Creates files inside one output directory and lists them in a manifest.
pub struct OutputDir {
    root: PathBuf,
    manifest: RunManifest,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>, config: RunConfig) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(OutputDir {
            root,
            manifest: RunManifest::new(config),
        })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn field_csv(&mut self, name: &str, field: &ComplexField) -> Result<()> {
        let p = self.root.join(name);
        write_field_csv(field, &p)?;
        self.manifest.record(&p, ContentKind::FieldCsv)
    }

    pub fn amplitude_pgm(&mut self, name: &str, field: &ComplexField) -> Result<()> {
        let p = self.root.join(name);
        write_pgm_amplitude(field, &p)?;
        self.manifest.record(&p, ContentKind::AmplitudePgm)
    }

    pub fn phase_ppm(&mut self, name: &str, phase: &PhaseMap) -> Result<()> {
        let p = self.root.join(name);
        write_ppm_phase(phase, &p)?;
        self.manifest.record(&p, ContentKind::PhasePpm)
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, report: &T) -> Result<()> {
        let p = self.root.join(name);
        write_json_report(report, &p)?;
        self.manifest.record(&p, ContentKind::Json)
    }

    /// Write `manifest.json` and return the manifest.
    pub fn finish(self) -> Result<RunManifest> {
        write_json_report(&self.manifest, self.root.join("manifest.json"))?;
        Ok(self.manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vortexdetect::{DetectionParams, VortexReport};

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    fn synthetic(res: usize, f: impl Fn(f64, f64) -> Complex64 + Sync) -> ComplexField {
        ComplexField::from_fn(GridSpec::new(2.0, res).unwrap(), Provenance::Synthetic, f).unwrap()
    }

    #[test]
    fn csv_two_by_two_layout() {
        let mut buf = Vec::new();
        let one = Complex64::new(1.0, 0.0);
        write_samples_csv(&mut buf, &[-1.0, 1.0], &[one; 4]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split_terminator('\n').collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "x,y,re,im");
        assert_eq!(
            lines[2],
            "1.0000000000000000e0,-1.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0"
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn csv_round_trip_is_bitwise() {
        let dir = tmp();
        let f = synthetic(16, |x, y| Complex64::new((x * 1.7).sin() / 3.0, -y.exp() * 1e-200));
        let p = dir.path().join("f.csv");
        write_field_csv(&f, &p).unwrap();
        let back = read_field_csv(&p).unwrap();
        assert_eq!(back.grid(), f.grid());
        for (a, b) in f.values().iter().zip(back.values()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn csv_reports_first_bad_line() {
        let dir = tmp();
        let p = dir.path().join("f.csv");
        write_field_csv(&synthetic(16, Complex64::new), &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[7] = "0.1,0.2,abc,0".into();
        lines[9] = "garbage".into();
        fs::write(&p, lines.join("\n")).unwrap();
        match read_field_csv(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 8),
            other => panic!("expected parse error, got {other:?}"),
        }

        fs::write(&p, &text[..text.len() / 2]).unwrap();
        assert!(matches!(read_field_csv(&p), Err(Error::Parse { .. })));
        fs::write(&p, "x,y,re\n").unwrap();
        assert!(matches!(read_field_csv(&p), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn pgm_layout_and_constant_field() {
        let f = synthetic(16, |_, _| Complex64::new(2.0, 0.0));
        let bytes = encode_pgm(&amplitude_map(&f)).unwrap();
        let header = b"P5\n16 16\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(bytes.len(), header.len() + 256);
        assert!(bytes[header.len()..].iter().all(|&b| b == 0));
    }

    #[test]
    fn pgm_linear_map_and_orientation() {
        // amplitude grows with y, so the top row must be brightest
        let f = synthetic(16, |_, y| Complex64::new(y + 2.0, 0.0));
        let bytes = encode_pgm(&amplitude_map(&f)).unwrap();
        let body = &bytes[b"P5\n16 16\n255\n".len()..];
        assert!(body[..16].iter().all(|&b| b == 255));
        assert!(body[body.len() - 16..].iter().all(|&b| b == 0));
    }

    #[test]
    fn ppm_cyclic_hue() {
        assert_eq!(hue_to_rgb(0.0), [255, 0, 0]);
        assert_eq!(hue_to_rgb(1.0), [255, 0, 0]);
        assert_eq!(hue_to_rgb(1.0 / 3.0), [0, 255, 0]);
        assert_eq!(hue_to_rgb(2.0 / 3.0), [0, 0, 255]);
        let a = hue_to_rgb((PI + PI) / TAU);
        let b = hue_to_rgb((-PI + 1e-9 + PI) / TAU);
        for k in 0..3 {
            assert!((i16::from(a[k]) - i16::from(b[k])).abs() <= 1);
        }
    }

    #[test]
    fn ppm_layout_and_domain() {
        let zeros = vec![0.0; 256];
        let bytes = encode_ppm(&zeros).unwrap();
        let header = b"P6\n16 16\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(bytes.len(), header.len() + 3 * 256);
        let body = &bytes[header.len()..];
        assert!(body.chunks(3).all(|px| px == &body[..3]));
        let mut bad = zeros.clone();
        bad[3] = -PI;
        assert!(matches!(encode_ppm(&bad), Err(Error::Domain(_))));
        bad[3] = f64::NAN;
        assert!(matches!(encode_ppm(&bad), Err(Error::NonFinite(_))));
        assert!(encode_ppm(&[0.0; 15]).is_err());
    }

    #[test]
    fn pgm_rejects_nan() {
        let mut v = vec![1.0; 16];
        v[0] = f64::INFINITY;
        assert!(matches!(encode_pgm(&v), Err(Error::NonFinite(_))));
    }

    #[test]
    fn empty_vortex_report_json() {
        let r = VortexReport::new(DetectionParams::default(), Vec::new());
        let text = to_json_string(&r).unwrap();
        assert_eq!(
            text,
            "{\"params\":{\"amplitude_floor\":1.0000000000000000e-3,\"merge_radius\":3.0000000000000000e0},\
             \"count\":0,\"total_charge\":0,\"vortices\":[]}\n"
        );
    }

    #[test]
    fn json_rejects_non_finite() {
        #[derive(Serialize)]
        struct Doc {
            v: f64,
        }
        assert!(matches!(to_json_string(&Doc { v: f64::NAN }), Err(Error::NonFinite(_))));
        assert!(to_json_string(&Doc { v: f64::NEG_INFINITY }).is_err());
    }

    #[test]
    fn json_round_trip_preserves_floats() {
        let values = [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 5e-324];
        let text = to_json_string(&values[..]).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        for (a, b) in values.iter().zip(&back) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn manifest_lists_written_files() {
        let dir = tmp();
        let mut out = OutputDir::create(dir.path().join("run"), RunConfig::new("test")).unwrap();
        let f = synthetic(16, Complex64::new);
        out.field_csv("field.csv", &f).unwrap();
        out.amplitude_pgm("amplitude.pgm", &f).unwrap();
        let m = out.finish().unwrap();
        let names: Vec<&str> = m.outputs.iter().map(|o| o.filename.as_str()).collect();
        assert_eq!(names, ["field.csv", "amplitude.pgm"]);
        assert_eq!(m.outputs[1].bytes, (b"P5\n16 16\n255\n".len() + 256) as u64);
        assert!(dir.path().join("run/manifest.json").exists());
        assert!(m.timestamp.ends_with('Z'));
    }
}
