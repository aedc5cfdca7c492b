//! File formats: sets JSON, field and right-hand-side JSON lines, reports,
//! systems and spectral clouds as CSV. Floats are written with 17 significant
//! digits and every file is replaced atomically.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsm::{Rhs, SolveReport};
use crate::operator::BandedSystem;
use crate::pseudoergodic::{DiagonalField, FieldOrientation, Generator, IidSampler, SamplingLaw, Triple};
use crate::spectra::{CloudKind, GridSpec, Pseudospectrum, SpectralCloud};
use crate::symbol_sets::{ComplexPoint, SetShape, SymbolSet, TriSymbolSet, DEFAULT_SAMPLES};

type C = ComplexPoint;

/// `{:.16e}`: 17 significant digits, round-trips every finite double.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }
    fn write_f32<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with fixed float formatting.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser).map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("json is utf-8"))
}

/// Writes `contents` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn parse_err(origin: &str, line_offset: usize, e: serde_json::Error) -> Error {
    Error::Config(format!("{origin}:{}:{}: {e}", e.line() + line_offset, e.column()))
}

// ---- sets ----

fn full_turn() -> f64 {
    std::f64::consts::TAU
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ShapeSpec {
    Points {
        points: Vec<C>,
    },
    Interval {
        lo: f64,
        hi: f64,
    },
    Circle {
        radius: f64,
        #[serde(default)]
        angle_lo: f64,
        #[serde(default = "full_turn")]
        angle_hi: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetSpec {
    #[serde(flatten)]
    pub shape: ShapeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<SamplingLaw>,
}

impl SetSpec {
    pub fn build(&self) -> Result<SymbolSet> {
        let shape = match self.shape.clone() {
            ShapeSpec::Points { points } => SetShape::Points { points },
            ShapeSpec::Interval { lo, hi } => SetShape::Interval { lo, hi },
            ShapeSpec::Circle { radius, angle_lo, angle_hi } => SetShape::Circle { radius, angle_lo, angle_hi },
        };
        let n = match &shape {
            SetShape::Points { points } => points.len().max(1),
            _ => self.samples.unwrap_or(DEFAULT_SAMPLES),
        };
        SymbolSet::new(shape, n)
    }

    pub fn describe(set: &SymbolSet, law: SamplingLaw) -> Self {
        let (shape, samples) = match set.shape().clone() {
            SetShape::Points { points } => (ShapeSpec::Points { points }, None),
            SetShape::Interval { lo, hi } => (ShapeSpec::Interval { lo, hi }, Some(set.sample_count())),
            SetShape::Circle { radius, angle_lo, angle_hi } => {
                (ShapeSpec::Circle { radius, angle_lo, angle_hi }, Some(set.sample_count()))
            }
        };
        let distribution = (law != SamplingLaw::Uniform).then_some(law);
        Self { shape, samples, distribution }
    }
}

/// The `--sets` document: one entry per diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetsDoc {
    pub u: SetSpec,
    pub v: SetSpec,
    pub w: SetSpec,
}

impl SetsDoc {
    pub fn build(&self) -> Result<TriSymbolSet> {
        Ok(TriSymbolSet::new(self.u.build()?, self.v.build()?, self.w.build()?))
    }

    pub fn laws(&self) -> [SamplingLaw; 3] {
        [&self.u, &self.v, &self.w].map(|s| s.distribution.unwrap_or_default())
    }

    pub fn describe(sets: &TriSymbolSet, laws: [SamplingLaw; 3]) -> Self {
        Self {
            u: SetSpec::describe(sets.u(), laws[0]),
            v: SetSpec::describe(sets.v(), laws[1]),
            w: SetSpec::describe(sets.w(), laws[2]),
        }
    }

    pub fn sampler(&self, seed: u64) -> Result<IidSampler> {
        Ok(IidSampler::new(self.build()?, seed).with_laws(self.laws()))
    }
}

pub fn parse_sets(text: &str, origin: &str) -> Result<SetsDoc> {
    let doc: SetsDoc = serde_json::from_str(text).map_err(|e| parse_err(origin, 0, e))?;
    doc.build().map_err(|e| Error::Config(format!("{origin}: {e}")))?;
    Ok(doc)
}

pub fn read_sets(path: &Path) -> Result<SetsDoc> {
    parse_sets(&read_text(path)?, &path.display().to_string())
}

// ---- fields ----

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Explicit,
    WordEnumeration { alphabet: Vec<Triple> },
    Iid { seed: u64, sets: SetsDoc },
}

impl GeneratorSpec {
    pub fn of(g: &Generator) -> Self {
        match g {
            Generator::Explicit => Self::Explicit,
            Generator::WordEnumeration { alphabet } => Self::WordEnumeration { alphabet: alphabet.clone() },
            Generator::Iid(s) => Self::Iid { seed: s.seed, sets: SetsDoc::describe(&s.sets, s.laws) },
        }
    }

    pub fn build(&self) -> Result<Generator> {
        Ok(match self {
            Self::Explicit => Generator::Explicit,
            Self::WordEnumeration { alphabet } => Generator::WordEnumeration { alphabet: alphabet.clone() },
            Self::Iid { seed, sets } => Generator::Iid(sets.sampler(*seed)?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub orientation: FieldOrientation,
    pub lo: i64,
    pub hi: i64,
    pub generator: GeneratorSpec,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine<T> {
    header: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub i: i64,
    pub u: C,
    pub v: C,
    pub w: C,
}

pub fn field_to_jsonl(field: &DiagonalField) -> Result<String> {
    let header = FieldHeader {
        orientation: field.orientation(),
        lo: field.lo(),
        hi: field.hi(),
        generator: GeneratorSpec::of(field.generator()),
    };
    let mut out = to_json(&HeaderLine { header })?;
    out.push('\n');
    for (k, t) in field.triples().iter().enumerate() {
        out.push_str(&to_json(&FieldRecord { i: field.lo() + k as i64, u: t.u, v: t.v, w: t.w })?);
        out.push('\n');
    }
    Ok(out)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

pub fn parse_field(text: &str, origin: &str) -> Result<DiagonalField> {
    let mut lines = data_lines(text);
    let (n, first) = lines.next().ok_or_else(|| Error::Config(format!("{origin}: empty field file")))?;
    let header: HeaderLine<FieldHeader> = serde_json::from_str(first).map_err(|e| parse_err(origin, n - 1, e))?;
    let header = header.header;
    let mut triples = Vec::new();
    for (n, line) in lines {
        let rec: FieldRecord = serde_json::from_str(line).map_err(|e| parse_err(origin, n - 1, e))?;
        let expected = header.lo + triples.len() as i64;
        if rec.i != expected {
            return Err(Error::Config(format!("{origin}:{n}: index {} where {expected} was expected", rec.i)));
        }
        triples.push(Triple::new(rec.u, rec.v, rec.w));
    }
    if header.lo + triples.len() as i64 - 1 != header.hi {
        return Err(Error::Config(format!("{origin}: header declares [{}, {}] but {} records follow", header.lo, header.hi, triples.len())));
    }
    let generator = header.generator.build().map_err(|e| Error::Config(format!("{origin}: {e}")))?;
    DiagonalField::with_generator(header.lo, triples, generator, header.orientation)
        .map_err(|e| Error::Config(format!("{origin}: {e}")))
}

pub fn read_field(path: &Path) -> Result<DiagonalField> {
    parse_field(&read_text(path)?, &path.display().to_string())
}

pub fn write_field(path: &Path, field: &DiagonalField) -> Result<()> {
    write_atomic(path, field_to_jsonl(field)?.as_bytes())
}

// ---- right-hand sides ----

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhsRecord {
    pub i: i64,
    pub b: C,
}

pub fn rhs_to_jsonl(rhs: &Rhs) -> Result<String> {
    let mut out = String::new();
    for (&i, &b) in &rhs.entries {
        out.push_str(&to_json(&RhsRecord { i, b })?);
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_rhs(text: &str, origin: &str) -> Result<Rhs> {
    let mut rhs = Rhs::default();
    for (n, line) in data_lines(text) {
        let rec: RhsRecord = serde_json::from_str(line).map_err(|e| parse_err(origin, n - 1, e))?;
        if rhs.entries.insert(rec.i, rec.b).is_some() {
            return Err(Error::Config(format!("{origin}:{n}: duplicate index {}", rec.i)));
        }
    }
    Ok(rhs)
}

pub fn read_rhs(path: &Path) -> Result<Rhs> {
    parse_rhs(&read_text(path)?, &path.display().to_string())
}

// ---- solve reports ----

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Columns `n,l_n,r_n,size,inv_norm,residual,delta`.
pub fn report_csv(report: &SolveReport) -> String {
    let mut out = String::from("n,l_n,r_n,size,inv_norm,residual,delta\n");
    for r in &report.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            r.l,
            r.r,
            r.size,
            opt(r.inverse_norm),
            fmt_f64(r.residual_inf),
            opt(r.componentwise_delta)
        );
    }
    out
}

// ---- banded systems ----

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemHeader {
    pub l: i64,
    pub r: i64,
    pub shift_k: i32,
}

/// Band rows padded to the window size; the header sits next to the CSV as `<stem>.json`.
pub fn system_csv(sys: &BandedSystem) -> String {
    let mut out = String::from("sub_re,sub_im,main_re,main_im,super_re,super_im\n");
    let cell = |band: &[C], i: usize| match band.get(i) {
        Some(z) => format!("{},{}", fmt_f64(z.re), fmt_f64(z.im)),
        None => ",".into(),
    };
    for i in 0..sys.dim() {
        let _ = writeln!(out, "{},{},{}", cell(&sys.sub, i), cell(&sys.main, i), cell(&sys.sup, i));
    }
    out
}

pub fn system_header_path(csv: &Path) -> std::path::PathBuf {
    csv.with_extension("json")
}

pub fn write_system(path: &Path, sys: &BandedSystem) -> Result<()> {
    let header = SystemHeader { l: sys.l, r: sys.r, shift_k: sys.shift_k };
    write_atomic(&system_header_path(path), to_json(&header)?.as_bytes())?;
    write_atomic(path, system_csv(sys).as_bytes())
}

pub fn parse_system(header: &SystemHeader, csv: &str, origin: &str) -> Result<BandedSystem> {
    let (mut sub, mut main, mut sup) = (Vec::new(), Vec::new(), Vec::new());
    for (n, line) in data_lines(csv).skip(1) {
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 6 {
            return Err(Error::Config(format!("{origin}:{n}: expected 6 columns, found {}", cols.len())));
        }
        for (band, k) in [(&mut sub, 0), (&mut main, 2), (&mut sup, 4)] {
            if cols[k].is_empty() && cols[k + 1].is_empty() {
                continue;
            }
            let p = |s: &str| s.parse::<f64>().map_err(|e| Error::Config(format!("{origin}:{n}: {e}")));
            band.push(C::new(p(cols[k])?, p(cols[k + 1])?));
        }
    }
    BandedSystem::from_bands(header.l, header.r, header.shift_k, sub, main, sup)
        .map_err(|e| Error::Config(format!("{origin}: {e}")))
}

pub fn read_system(path: &Path) -> Result<BandedSystem> {
    let hp = system_header_path(path);
    let header: SystemHeader =
        serde_json::from_str(&read_text(&hp)?).map_err(|e| parse_err(&hp.display().to_string(), 0, e))?;
    parse_system(&header, &read_text(path)?, &path.display().to_string())
}

// ---- spectral clouds ----

/// `value` column for singular values, `re,im` otherwise.
pub fn cloud_csv(cloud: &SpectralCloud) -> String {
    let mut out = String::new();
    match cloud.kind {
        CloudKind::SingularValues => {
            out.push_str("value\n");
            for z in &cloud.points {
                let _ = writeln!(out, "{}", fmt_f64(z.re));
            }
        }
        _ => {
            out.push_str("re,im\n");
            for z in &cloud.points {
                let _ = writeln!(out, "{},{}", fmt_f64(z.re), fmt_f64(z.im));
            }
        }
    }
    out
}

pub fn points_csv(points: &[C]) -> String {
    let mut out = String::from("re,im\n");
    for z in points {
        let _ = writeln!(out, "{},{}", fmt_f64(z.re), fmt_f64(z.im));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudospectrumHeader {
    pub grid: GridSpec,
    pub eps_levels: Vec<f64>,
    pub l: i64,
    pub r: i64,
    pub shift_k: i32,
}

/// Level sets as `eps,re,im` rows.
pub fn levels_csv(ps: &Pseudospectrum) -> String {
    let mut out = String::from("eps,re,im\n");
    for level in &ps.levels {
        let CloudKind::Pseudospectrum { eps } = level.kind else { continue };
        for z in &level.points {
            let _ = writeln!(out, "{},{},{}", fmt_f64(eps), fmt_f64(z.re), fmt_f64(z.im));
        }
    }
    out
}

/// `sigma_min` as an `ny x nx` matrix, first row at `y0`.
pub fn sigma_matrix_csv(ps: &Pseudospectrum) -> String {
    let mut out = String::new();
    for row in ps.sigma_min.chunks(ps.grid.nx) {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
