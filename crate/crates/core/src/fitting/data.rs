//! Tabulated (x, y) series and their ingestion from CSV or JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Length unit of the abscissa column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LengthUnit {
    #[serde(rename = "m")]
    Metre,
    #[serde(rename = "um", alias = "µm", alias = "μm")]
    Micrometre,
    #[serde(rename = "nm")]
    Nanometre,
}

impl LengthUnit {
    pub fn to_metres(self) -> f64 {
        match self {
            LengthUnit::Metre => 1.0,
            LengthUnit::Micrometre => 1e-6,
            LengthUnit::Nanometre => 1e-9,
        }
    }

    /// Recognise a unit name ("nm", "um", "µm", "micron", "m").
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_lowercase().as_str() {
            "m" | "metre" | "meter" | "metres" | "meters" => Some(LengthUnit::Metre),
            "um" | "µm" | "μm" | "micron" | "microns" | "micrometre" | "micrometer" => {
                Some(LengthUnit::Micrometre)
            }
            "nm" | "nanometre" | "nanometer" => Some(LengthUnit::Nanometre),
            _ => None,
        }
    }

    /// Find a unit token inside a column name such as `d_um` or `z [nm]`.
    fn from_column_name(name: &str) -> Option<Self> {
        name.split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .skip(1)
            .find_map(Self::parse)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesFormat {
    Csv,
    Json,
}

/// Abscissae in metres, ordinates dimensionless (rates in units of Γ₀).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSeries {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub label: String,
}

impl SampleSeries {
    pub fn new(x: Vec<f64>, y: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidData(format!(
                "x and y lengths differ ({} vs {})",
                x.len(),
                y.len()
            )));
        }
        if x.is_empty() {
            return Err(Error::InvalidData("series is empty".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidData(
                "series contains non-finite values".into(),
            ));
        }
        if let Some(i) = x.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidData(format!(
                "abscissae must be strictly increasing (entry {} is {} after {})",
                i + 1,
                x[i + 1],
                x[i]
            )));
        }
        Ok(Self {
            x,
            y,
            label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Points with x ≥ `x_min`.
    pub fn restricted(&self, x_min: f64) -> (Vec<f64>, Vec<f64>) {
        self.x
            .iter()
            .zip(&self.y)
            .filter(|(x, _)| **x >= x_min)
            .map(|(x, y)| (*x, *y))
            .unzip()
    }
}

#[derive(Deserialize)]
struct JsonSeries {
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    unit: Option<String>,
    x: Vec<f64>,
    y: Vec<f64>,
}

/// Read a series from `path`. The format follows the extension when not
/// given. A unit declared in the file wins over `default_unit`.
pub fn load_series(
    path: &Path,
    format: Option<SeriesFormat>,
    default_unit: LengthUnit,
) -> Result<SampleSeries> {
    let format = format.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => SeriesFormat::Json,
        _ => SeriesFormat::Csv,
    });
    let text = std::fs::read_to_string(path)?;
    let label = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("series")
        .to_string();
    parse_series(
        &text,
        format,
        default_unit,
        &path.display().to_string(),
        &label,
    )
}

/// Parse series text; `source` names the input in error messages.
pub fn parse_series(
    text: &str,
    format: SeriesFormat,
    default_unit: LengthUnit,
    source: &str,
    label: &str,
) -> Result<SampleSeries> {
    match format {
        SeriesFormat::Csv => parse_csv(text, default_unit, source, label),
        SeriesFormat::Json => parse_json(text, default_unit, source, label),
    }
}

fn parse_err(source: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: source.to_string(),
        line,
        msg: msg.into(),
    }
}

fn comment_unit(text: &str, source: &str) -> Result<Option<LengthUnit>> {
    for (i, line) in text.lines().enumerate() {
        let Some(body) = line.trim_start().strip_prefix('#') else {
            continue;
        };
        let body = body.trim();
        if let Some(rest) = body
            .strip_prefix("unit:")
            .or_else(|| body.strip_prefix("unit ="))
        {
            return LengthUnit::parse(rest).map(Some).ok_or_else(|| {
                parse_err(source, i + 1, format!("unknown unit '{}'", rest.trim()))
            });
        }
    }
    Ok(None)
}

fn parse_csv(
    text: &str,
    default_unit: LengthUnit,
    source: &str,
    label: &str,
) -> Result<SampleSeries> {
    let mut unit = comment_unit(text, source)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut lines = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_err(source, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if rec.len() != 2 {
            return Err(parse_err(
                source,
                line,
                format!("expected 2 columns, found {}", rec.len()),
            ));
        }
        let a = rec[0].parse::<f64>();
        let b = rec[1].parse::<f64>();
        match (a, b) {
            (Ok(a), Ok(b)) => {
                if !(a.is_finite() && b.is_finite()) {
                    return Err(parse_err(source, line, "non-finite value"));
                }
                x.push(a);
                y.push(b);
                lines.push(line);
            }
            _ if idx == 0 && x.is_empty() => {
                if unit.is_none() {
                    unit = LengthUnit::from_column_name(&rec[0]);
                }
            }
            _ => {
                return Err(parse_err(
                    source,
                    line,
                    format!(
                        "cannot parse '{}' as two numbers",
                        rec.iter().collect::<Vec<_>>().join(",")
                    ),
                ))
            }
        }
    }
    if x.is_empty() {
        return Err(Error::InvalidData(format!("{source}: no data rows")));
    }
    for i in 1..x.len() {
        if x[i] == x[i - 1] {
            return Err(parse_err(
                source,
                lines[i],
                format!("duplicate abscissa {}", x[i]),
            ));
        }
        if x[i] < x[i - 1] {
            return Err(parse_err(
                source,
                lines[i],
                "abscissae must be strictly increasing",
            ));
        }
    }
    let f = unit.unwrap_or(default_unit).to_metres();
    SampleSeries::new(x.into_iter().map(|v| v * f).collect(), y, label)
}

fn parse_json(
    text: &str,
    default_unit: LengthUnit,
    source: &str,
    label: &str,
) -> Result<SampleSeries> {
    let s: JsonSeries =
        serde_json::from_str(text).map_err(|e| parse_err(source, e.line(), e.to_string()))?;
    let unit = match s.unit {
        Some(u) => LengthUnit::parse(&u)
            .ok_or_else(|| parse_err(source, 0, format!("unknown unit '{u}'")))?,
        None => default_unit,
    };
    let f = unit.to_metres();
    SampleSeries::new(
        s.x.into_iter().map(|v| v * f).collect(),
        s.y,
        s.label.unwrap_or_else(|| label.to_string()),
    )
    .map_err(|e| Error::InvalidData(format!("{source}: {e}")))
}
