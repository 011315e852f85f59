//! The end-to-end route prediction run over one simulated vehicle encounter.
//!
//! Each run walks a fixed state machine: capture and recognize the plate,
//! gate on the registry (a miss terminates before any radar work), take two
//! radar reads separated by the sampling interval, form the velocity
//! difference, and classify. Every step is appended to a [`Trace`] so the
//! gate behavior can be asserted after the fact.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::learn::{evaluate, Label, Report, TrainedModel};
use crate::plate::{recognize, render_plate, GlyphFont, PlateText};
use crate::radar::{
    doppler_velocity, reflect_frequency, velocity_delta, RadarCalibration, Velocity,
    VelocityDelta,
};
use crate::registry::Registry;
use crate::rng::SplitMix64;

/// Seconds between the two radar reads unless a scenario overrides it.
pub const DEFAULT_SAMPLE_INTERVAL: f64 = 5.0;

/// One simulated vehicle encounter. The vehicle moves with the linear
/// profile `v(t) = v0 + accel * t`; `true_intent` is ground truth for
/// scoring and is never shown to the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub plate: PlateText,
    pub true_intent: Label,
    /// Speed at the first radar read.
    pub v0: f64,
    /// Signed speed change per second (negative while braking).
    pub accel: f64,
    /// Emitted radar frequency (hertz).
    pub f_o: f64,
    /// Seconds between the two reads.
    pub interval: f64,
}

impl Scenario {
    pub fn new(
        plate: PlateText,
        true_intent: Label,
        v0: f64,
        accel: f64,
        f_o: f64,
        interval: f64,
    ) -> Result<Self> {
        if !v0.is_finite() || !accel.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "v0 and accel must be finite, got {v0} and {accel}"
            )));
        }
        if !f_o.is_finite() || f_o <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "emitted frequency must be positive and finite, got {f_o}"
            )));
        }
        if !interval.is_finite() || interval <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sample interval must be positive and finite, got {interval}"
            )));
        }
        Ok(Self { plate, true_intent, v0, accel, f_o, interval })
    }

    /// True speed at time `t` seconds after the first read.
    pub fn velocity_at(&self, t: f64) -> Velocity {
        Velocity(self.v0 + self.accel * t)
    }
}

/// Everything a run needs besides the scenario, registry and model.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub calibration: RadarCalibration,
    /// Binarization threshold handed to plate recognition.
    pub recognize_threshold: u8,
    pub font: GlyphFont,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            calibration: RadarCalibration::default(),
            recognize_threshold: 128,
            font: GlyphFont::builtin().clone(),
        }
    }
}

/// Result of one run: either the registry gate stopped it, or the pipeline
/// produced a prediction with all intermediate readings.
#[derive(Debug, Clone, PartialEq)]
pub enum PipelineOutcome {
    Unregistered {
        plate: PlateText,
    },
    Predicted {
        plate: PlateText,
        v1: Velocity,
        v2: Velocity,
        dv: VelocityDelta,
        mp: u8,
        label: Label,
    },
}

/// One step of the run, in execution order.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceStep {
    PlateDetected { digest: u64 },
    PlateRecognized { text: PlateText },
    RegistryHit { mp: u8 },
    RegistryMiss,
    FrequencySent { f_o: f64, t: f64 },
    VelocityComputed { v: Velocity },
    DeltaComputed { dv: VelocityDelta },
    Predicted { label: Label },
    Terminated,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceStep::PlateDetected { digest } => write!(f, "plate-detected digest={digest:016x}"),
            TraceStep::PlateRecognized { text } => write!(f, "plate-recognized text={text}"),
            TraceStep::RegistryHit { mp } => write!(f, "registry-hit mp={mp}"),
            TraceStep::RegistryMiss => write!(f, "registry-miss"),
            TraceStep::FrequencySent { f_o, t } => write!(f, "frequency-sent fo={f_o} t={t}"),
            TraceStep::VelocityComputed { v } => write!(f, "velocity-computed v={}", v.0),
            TraceStep::DeltaComputed { dv } => write!(f, "delta-computed dv={}", dv.0),
            TraceStep::Predicted { label } => write!(f, "predicted label={label}"),
            TraceStep::Terminated => write!(f, "terminated"),
        }
    }
}

/// Ordered record of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    steps: Vec<TraceStep>,
}

impl Trace {
    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    fn push(&mut self, step: TraceStep) {
        self.steps.push(step);
    }

    pub fn count_frequency_sent(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, TraceStep::FrequencySent { .. }))
            .count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            out.push_str(&step.to_string());
            out.push('\n');
        }
        out
    }
}

/// Execute the state machine for one scenario.
pub fn run_pipeline(
    scenario: &Scenario,
    registry: &Registry,
    model: &TrainedModel,
    config: &PipelineConfig,
    rng: &mut SplitMix64,
) -> Result<(PipelineOutcome, Trace)> {
    let mut trace = Trace::default();

    // Camera stage: capture the plate and recognize it.
    let image = render_plate(&scenario.plate, &config.font);
    trace.push(TraceStep::PlateDetected { digest: image.digest() });
    let recognized = recognize(&image, &config.font, config.recognize_threshold)?;
    trace.push(TraceStep::PlateRecognized { text: recognized.clone() });

    // Registry gate: a miss ends the run before any radar operation.
    let record = match registry.lookup(&recognized) {
        Some(record) => record,
        None => {
            trace.push(TraceStep::RegistryMiss);
            trace.push(TraceStep::Terminated);
            return Ok((PipelineOutcome::Unregistered { plate: recognized }, trace));
        }
    };
    let mp = record.mobility_pattern();
    trace.push(TraceStep::RegistryHit { mp });

    // Two radar reads, interval seconds apart.
    let read = |t: f64, trace: &mut Trace, rng: &mut SplitMix64| -> Result<Velocity> {
        trace.push(TraceStep::FrequencySent { f_o: scenario.f_o, t });
        let pair = reflect_frequency(scenario.velocity_at(t), scenario.f_o, &config.calibration, rng)?;
        let v = doppler_velocity(pair, &config.calibration)?;
        trace.push(TraceStep::VelocityComputed { v });
        Ok(v)
    };
    let v1 = read(0.0, &mut trace, rng)?;
    let v2 = read(scenario.interval, &mut trace, rng)?;

    let dv = velocity_delta(v1, v2);
    trace.push(TraceStep::DeltaComputed { dv });

    let label = model.predict(dv.0, mp);
    trace.push(TraceStep::Predicted { label });

    Ok((
        PipelineOutcome::Predicted { plate: recognized, v1, v2, dv, mp, label },
        trace,
    ))
}

/// The display line shown to the driver for one outcome. Velocities use
/// three decimal places; dv carries an explicit sign. Formatting is
/// locale-independent (always a `.` separator).
pub fn format_report_line(outcome: &PipelineOutcome) -> String {
    match outcome {
        PipelineOutcome::Unregistered { plate } => format!("PLATE={plate} UNREGISTERED"),
        PipelineOutcome::Predicted { plate, v1, v2, dv, mp, label } => format!(
            "PLATE={plate} V1={:.3} V2={:.3} DV={:+.3} MP={mp} PREDICT={label}",
            v1.0, v2.0, dv.0
        ),
    }
}

/// Outcome of a batch: per-scenario results in input order, plus the scored
/// report over the predicted runs. Unregistered runs are counted separately
/// and excluded from the metric denominators; if nothing was predicted the
/// report is absent.
#[derive(Debug)]
pub struct BatchResult {
    pub runs: Vec<Result<(PipelineOutcome, Trace)>>,
    pub report: Option<Report>,
    pub unregistered: usize,
    pub errored: usize,
}

/// Run every scenario, each on its own rng stream derived from the batch
/// seed and the scenario index, so results do not depend on evaluation
/// order. Per-run errors are collected, not fatal.
pub fn run_batch(
    scenarios: &[Scenario],
    registry: &Registry,
    model: &TrainedModel,
    config: &PipelineConfig,
    rng: &mut SplitMix64,
) -> BatchResult {
    let base = rng.next_u64();
    let mut runs = Vec::with_capacity(scenarios.len());
    let mut predictions = Vec::new();
    let mut truths = Vec::new();
    let mut unregistered = 0;
    let mut errored = 0;
    for (index, scenario) in scenarios.iter().enumerate() {
        let mut stream = SplitMix64::new(SplitMix64::new(base.wrapping_add(index as u64)).next_u64());
        let run = run_pipeline(scenario, registry, model, config, &mut stream);
        match &run {
            Ok((PipelineOutcome::Predicted { label, .. }, _)) => {
                predictions.push(*label);
                truths.push(scenario.true_intent);
            }
            Ok((PipelineOutcome::Unregistered { .. }, _)) => unregistered += 1,
            Err(_) => errored += 1,
        }
        runs.push(run);
    }
    let report = if predictions.is_empty() {
        None
    } else {
        Some(evaluate(&predictions, &truths).expect("lengths match by construction"))
    };
    BatchResult { runs, report, unregistered, errored }
}

const SCENARIO_HEADER: &str = "plate,intent,v0,a,fo,interval";

/// Parse the scenario batch file format: header `plate,intent,v0,a,fo,interval`,
/// one scenario per line.
pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, SCENARIO_HEADER)) => {}
        Some((_, other)) => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header {SCENARIO_HEADER:?}, got {other:?}"),
            })
        }
        None => return Err(Error::Parse { line: 1, msg: "missing header".into() }),
    }
    let mut scenarios = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let parts: Vec<&str> = line.split(',').collect();
        let [plate, intent, v0, a, fo, interval] = parts.as_slice() else {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 6 comma-separated fields, got {line:?}"),
            });
        };
        let plate = PlateText::new(*plate)
            .map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
        let intent: Label = intent
            .parse()
            .map_err(|_| Error::Parse { line: lineno, msg: format!("intent must be S or T, got {intent:?}") })?;
        let real = |name: &str, token: &str| -> Result<f64> {
            token.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("{name} must be a decimal real, got {token:?}"),
            })
        };
        let scenario = Scenario::new(
            plate,
            intent,
            real("v0", v0)?,
            real("a", a)?,
            real("fo", fo)?,
            real("interval", interval)?,
        )
        .map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
        scenarios.push(scenario);
    }
    Ok(scenarios)
}

pub fn scenarios_to_file_string(scenarios: &[Scenario]) -> String {
    let mut out = String::from(SCENARIO_HEADER);
    out.push('\n');
    for s in scenarios {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.plate, s.true_intent, s.v0, s.accel, s.f_o, s.interval
        ));
    }
    out
}

pub fn load_scenarios(path: impl AsRef<Path>) -> Result<Vec<Scenario>> {
    parse_scenarios(&std::fs::read_to_string(path)?)
}
