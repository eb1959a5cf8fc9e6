//! On-disk game descriptions.
//!
//! A game file is a JSON document. Matrices live on the full product space,
//! row-major, each entry a `[re, im]` pair, so arbitrary joint measurements
//! are expressible without any tensor-factor convention:
//!
//! ```json
//! {
//!   "players": [2, 2],
//!   "form": "povm",
//!   "outcomes": [ { "element": [[[1.0, 0.0], ...], ...], "payoffs": [1.0, -1.0] }, ... ],
//!   "zero_sum": true,
//!   "equilibrium": [ [[[0.5, 0.0], ...], ...], ... ]
//! }
//! ```
//!
//! Observable-form files carry `"form": "observables"` and an `observables`
//! list (one matrix per player) instead of `outcomes`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use spectraplex::error::Error;
use spectraplex::fixtures;
use spectraplex::game::{
    validate_observable_spec, validate_povm_spec, CheckLine, Outcome, QuantumGame,
    ValidationReport,
};
use spectraplex::hermitian::{ComplexMatrix, DensityMatrix, HermitianMatrix, C64};

use crate::error::{io_err, CliError, Result};

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

/// Which description a file carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameForm {
    Povm,
    Observables,
}

/// One measurement outcome as stored on disk.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutcomeSpec {
    pub element: MatrixSpec,
    pub payoffs: Vec<f64>,
}

/// The serialized form of a game.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GameSpecFile {
    pub players: Vec<usize>,
    pub form: GameForm,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outcomes: Vec<OutcomeSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observables: Vec<MatrixSpec>,
    pub zero_sum: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibrium: Option<Vec<MatrixSpec>>,
}

fn complex_from_spec(rows: &MatrixSpec, name: &str) -> Result<ComplexMatrix> {
    let dim = rows.len();
    let mut converted = Vec::with_capacity(dim);
    for row in rows {
        if row.len() != dim {
            return Err(CliError::Lib(Error::DimMismatch(format!(
                "{name}: matrix must be square, got a row of {} entries in a {dim}-row matrix",
                row.len()
            ))));
        }
        converted.push(row.iter().map(|&[re, im]| C64::new(re, im)).collect());
    }
    ComplexMatrix::from_rows(&converted).map_err(CliError::Lib)
}

fn spec_from_complex(m: &ComplexMatrix) -> MatrixSpec {
    (0..m.dim())
        .map(|r| {
            (0..m.dim())
                .map(|c| {
                    let v = m.get(r, c);
                    [v.re, v.im]
                })
                .collect()
        })
        .collect()
}

fn hermitian_from_spec(rows: &MatrixSpec, name: &str) -> Result<HermitianMatrix> {
    let m = complex_from_spec(rows, name)?;
    HermitianMatrix::labeled(m, name).map_err(CliError::Lib)
}

fn fail(report: &mut ValidationReport, name: &'static str, detail: String) {
    report.lines.push(CheckLine {
        name,
        passed: false,
        detail,
    });
}

fn pass(report: &mut ValidationReport, name: &'static str, detail: String) {
    report.lines.push(CheckLine {
        name,
        passed: true,
        detail,
    });
}

impl GameSpecFile {
    /// Run every structural check, returning the full report and the game
    /// when everything passes. Matrix-level failures (a non-Hermitian entry,
    /// a ragged row) become failed report lines naming the matrix.
    pub fn check(&self) -> (ValidationReport, Option<QuantumGame>) {
        let mut report = ValidationReport::default();

        match self.form {
            GameForm::Povm => {
                if !self.observables.is_empty() {
                    fail(
                        &mut report,
                        "form",
                        "a povm-form file must not carry an observables list".into(),
                    );
                    return (report, None);
                }
                let mut outcomes = Vec::with_capacity(self.outcomes.len());
                for (k, o) in self.outcomes.iter().enumerate() {
                    let name = format!("outcome {} element", k + 1);
                    match hermitian_from_spec(&o.element, &name) {
                        Ok(element) => outcomes.push(Outcome::new(element, o.payoffs.clone())),
                        Err(err) => {
                            fail(&mut report, "hermiticity", err.to_string());
                            return (report, None);
                        }
                    }
                }
                let mut checks = validate_povm_spec(&self.players, &outcomes, self.zero_sum);
                report.lines.append(&mut checks.lines);
                if !report.ok() {
                    return (report, None);
                }
                let game = QuantumGame::from_povm(self.players.clone(), outcomes, self.zero_sum)
                    .expect("the validation report passed");
                self.attach_equilibrium(game, report)
            }
            GameForm::Observables => {
                if !self.outcomes.is_empty() {
                    fail(
                        &mut report,
                        "form",
                        "an observables-form file must not carry an outcomes list".into(),
                    );
                    return (report, None);
                }
                let mut observables = Vec::with_capacity(self.observables.len());
                for (i, rows) in self.observables.iter().enumerate() {
                    let name = format!("player {} observable", i + 1);
                    match hermitian_from_spec(rows, &name) {
                        Ok(w) => observables.push(w),
                        Err(err) => {
                            fail(&mut report, "hermiticity", err.to_string());
                            return (report, None);
                        }
                    }
                }
                let mut checks =
                    validate_observable_spec(&self.players, &observables, self.zero_sum);
                report.lines.append(&mut checks.lines);
                if !report.ok() {
                    return (report, None);
                }
                let game =
                    QuantumGame::from_observables(self.players.clone(), observables, self.zero_sum)
                        .expect("the validation report passed");
                self.attach_equilibrium(game, report)
            }
        }
    }

    fn attach_equilibrium(
        &self,
        game: QuantumGame,
        mut report: ValidationReport,
    ) -> (ValidationReport, Option<QuantumGame>) {
        let Some(entries) = &self.equilibrium else {
            return (report, Some(game));
        };
        let mut profile = Vec::with_capacity(entries.len());
        for (i, rows) in entries.iter().enumerate() {
            let name = format!("equilibrium entry {}", i + 1);
            let m = match complex_from_spec(rows, &name) {
                Ok(m) => m,
                Err(err) => {
                    fail(&mut report, "equilibrium candidate", err.to_string());
                    return (report, None);
                }
            };
            match DensityMatrix::from_matrix(m) {
                Ok(p) => profile.push(p),
                Err(err) => {
                    fail(&mut report, "equilibrium candidate", format!("{name}: {err}"));
                    return (report, None);
                }
            }
        }
        match game.with_equilibrium(profile) {
            Ok(game) => {
                pass(
                    &mut report,
                    "equilibrium candidate",
                    format!("{} density matrices of matching dimension", entries.len()),
                );
                (report, Some(game))
            }
            Err(err) => {
                fail(&mut report, "equilibrium candidate", err.to_string());
                (report, None)
            }
        }
    }

    /// Build the game or fail with the first violated check.
    pub fn build(&self) -> Result<QuantumGame> {
        let (report, game) = self.check();
        match game {
            Some(game) => Ok(game),
            None => {
                let line = report.first_failure().expect("no game means a failure");
                Err(CliError::Lib(Error::InvalidGame(format!(
                    "{}: {}",
                    line.name, line.detail
                ))))
            }
        }
    }

    /// Serialize a game back to the file form.
    pub fn from_game(game: &QuantumGame) -> Self {
        let (form, outcomes, observables) = match game.outcomes() {
            Some(outcomes) => (
                GameForm::Povm,
                outcomes
                    .iter()
                    .map(|o| OutcomeSpec {
                        element: spec_from_complex(o.element.matrix()),
                        payoffs: o.payoffs.clone(),
                    })
                    .collect(),
                Vec::new(),
            ),
            None => (
                GameForm::Observables,
                Vec::new(),
                game.observables()
                    .iter()
                    .map(|w| spec_from_complex(w.matrix()))
                    .collect(),
            ),
        };
        GameSpecFile {
            players: game.dims().to_vec(),
            form,
            outcomes,
            observables,
            zero_sum: game.is_zero_sum(),
            equilibrium: game
                .equilibrium()
                .map(|eq| eq.iter().map(|p| spec_from_complex(p.matrix())).collect()),
        }
    }
}

/// Read a game file.
pub fn load_spec(path: &Path) -> Result<GameSpecFile> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Write a game file (pretty-printed, trailing newline).
pub fn save_spec(path: &Path, spec: &GameSpecFile) -> Result<()> {
    let mut text = serde_json::to_string_pretty(spec).expect("game file types always serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

/// Resolve a `--game` value: a builtin fixture name first, a file path
/// otherwise.
pub fn resolve_game(source: &str) -> Result<QuantumGame> {
    if fixtures::FIXTURE_NAMES.contains(&source) {
        return fixtures::by_name(source).map_err(CliError::Lib);
    }
    load_spec(Path::new(source))?.build()
}
