//! Report emission: versioned JSON with fixed float formatting, long-form
//! CSV and two-column plot data.

use std::io::{self, Write};
use std::path::Path;

use serde::ser::Serialize;
use serde::Serialize as DeriveSerialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use super::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

/// One `(experiment, n, statistic, value)` row.
#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct CsvRow {
    pub experiment: &'static str,
    pub n: usize,
    pub statistic: &'static str,
    pub value: f64,
}

impl CsvRow {
    pub fn new(experiment: &'static str, n: usize, statistic: &'static str, value: f64) -> Self {
        CsvRow { experiment, n, statistic, value }
    }
}

pub trait Report: Serialize {
    fn kind(&self) -> &'static str;

    fn csv_rows(&self) -> Vec<CsvRow>;

    /// Named `(x, y)` series for plotting.
    fn plot_series(&self) -> Vec<(String, Vec<(f64, f64)>)> {
        Vec::new()
    }
}

/// Top-level JSON document.
#[derive(Debug, Clone, DeriveSerialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub schema_version: u32,
    pub kind: &'a str,
    pub config: &'a C,
    pub report: &'a R,
}

impl<'a, C: Serialize, R: Report> Envelope<'a, C, R> {
    pub fn new(config: &'a C, report: &'a R) -> Self {
        Envelope { schema_version: SCHEMA_VERSION, kind: report.kind(), config, report }
    }
}

/// Pretty JSON with every float as 17 significant digits in exponent form.
struct FixedFloats<'a>(PrettyFormatter<'a>);

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(writer $(, $arg)*)
            }
        )*
    };
}

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    forward! {
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    }
}

/// Deterministic JSON text for `value`. Non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, HarnessError> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser).map_err(|e| HarnessError::Invalid(e.to_string()))?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

pub fn write_csv<W: Write>(rows: &[CsvRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Whitespace-separated two-column text, one `# name` block per series.
pub fn plotdata(series: &[(String, Vec<(f64, f64)>)]) -> String {
    let mut out = String::new();
    for (i, (name, points)) in series.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("# {name}\n"));
        for (x, y) in points {
            out.push_str(&format!("{x:.16e} {y:.16e}\n"));
        }
    }
    out
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| HarnessError::Io(e.error))?;
    Ok(())
}
