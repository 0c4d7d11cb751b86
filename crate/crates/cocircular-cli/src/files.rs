//! Problem-spec and report file formats.
//!
//! Reports are JSON with every float printed at 17 significant digits, which
//! reproduces the underlying doubles exactly: re-running a solve with the
//! echoed spec and seed rewrites the report byte for byte.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use cocircular::{
    CircularConfig, CurvedPolygonConfig, InteractionKernel, MassVector, ProblemSpec,
    StationaryReport, UniquenessReport, Variant,
};

/// Optional starting configuration; masses come from the spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialConfig {
    pub r: f64,
    pub alpha: Vec<f64>,
}

/// On-disk problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpecFile {
    pub kernel: InteractionKernel,
    pub masses: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub central_mass: Option<f64>,
    pub spin: f64,
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialConfig>,
}

impl ProblemSpecFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read problem file {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("malformed problem file {}", path.display()))
    }

    pub fn mass_vector(&self) -> Result<MassVector> {
        Ok(match self.central_mass {
            Some(c) => MassVector::with_central(self.masses.clone(), c)?,
            None => MassVector::new(self.masses.clone())?,
        })
    }

    /// Validate into a solvable problem; errors name the offending field.
    pub fn to_problem(&self) -> Result<ProblemSpec> {
        let masses = self.mass_vector()?;
        Ok(ProblemSpec::new(
            self.kernel,
            masses,
            self.spin,
            self.variant,
        )?)
    }

    /// The file's starting configuration, when one is given.
    pub fn initial_config(&self) -> Result<Option<CircularConfig>> {
        match &self.initial {
            None => Ok(None),
            Some(init) => {
                let config =
                    CircularConfig::new(init.r, init.alpha.clone(), self.mass_vector()?)
                        .context("invalid initial configuration")?;
                Ok(Some(config))
            }
        }
    }
}

/// Report written by `solve` and `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReportFile {
    pub tool_version: String,
    pub seed: u64,
    pub spec: ProblemSpecFile,
    pub stationary: StationaryReport,
    /// Feasibility margin of the configuration provided in the spec file,
    /// for central-mass problems. A converged stationary point always has a
    /// positive margin, so infeasibility is a property of the input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_feasibility_margin: Option<f64>,
    /// Hyperboloid lift of the solved configuration, for curved problems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curved_config: Option<CurvedPolygonConfig>,
}

/// Report written by `uniqueness`: one entry per requested ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReportFile {
    pub tool_version: String,
    pub seed: u64,
    pub starts: usize,
    pub spec: ProblemSpecFile,
    pub orderings: Vec<UniquenessReport>,
}

pub fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// Pretty JSON formatter printing every float with 17 significant digits.
struct SigDigits17 {
    indent: usize,
    has_value: bool,
}

impl SigDigits17 {
    fn new() -> Self {
        SigDigits17 {
            indent: 0,
            has_value: false,
        }
    }

    fn newline<W: ?Sized + Write>(&self, writer: &mut W) -> std::io::Result<()> {
        writer.write_all(b"\n")?;
        for _ in 0..self.indent {
            writer.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for SigDigits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        writer.write_all(b"[")
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(writer)?;
        }
        writer.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        if !first {
            writer.write_all(b",")?;
        }
        self.newline(writer)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, _writer: &mut W) -> std::io::Result<()> {
        self.has_value = true;
        Ok(())
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        writer.write_all(b"{")
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(writer)?;
        }
        writer.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        if !first {
            writer.write_all(b",")?;
        }
        self.newline(writer)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        writer.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, _writer: &mut W) -> std::io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

/// Serialize a report document to deterministic 17-digit JSON.
pub fn to_report_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits17::new());
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out)?)
}

pub fn write_report<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let json = to_report_json(value)?;
    fs::write(path, json).with_context(|| format!("cannot write report {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        #[derive(Serialize, Deserialize, PartialEq, Debug)]
        struct Doc {
            a: f64,
            b: Vec<f64>,
        }
        let doc = Doc {
            a: std::f64::consts::PI,
            b: vec![1.0, 0.1, 2.0f64.sqrt(), 1e-300],
        };
        let json = to_report_json(&doc).unwrap();
        assert!(json.contains("3.1415926535897931e0"), "{json}");
        let back: Doc = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn spec_file_parses_and_validates() {
        let text = r#"{
            "kernel": {"family": "power_law", "a": 3.0},
            "masses": [1.0, 1.0],
            "spin": 0.5,
            "variant": "plain",
            "initial": {"r": 1.3, "alpha": [0.0, 2.9]}
        }"#;
        let file: ProblemSpecFile = serde_json::from_str(text).unwrap();
        let spec = file.to_problem().unwrap();
        assert_eq!(spec.spin(), 0.5);
        let init = file.initial_config().unwrap().unwrap();
        assert_eq!(init.radius(), 1.3);
    }

    #[test]
    fn inadmissible_kernel_is_named() {
        let text = r#"{
            "kernel": {"family": "power_law", "a": 0.5},
            "masses": [1.0, 1.0],
            "spin": 0.5,
            "variant": "plain"
        }"#;
        let file: ProblemSpecFile = serde_json::from_str(text).unwrap();
        let err = file.to_problem().unwrap_err().to_string();
        assert!(err.contains("kernel inadmissible: g increasing"), "{err}");
    }
}
