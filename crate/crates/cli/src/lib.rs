//! Pipeline stages behind the `sigclass` command: `synth` renders recordings,
//! `rows` turns them into fused spectrum rows, `heatmap` draws per-target
//! heat maps, `train` selects bins and fits the network, `eval` scores a
//! saved checkpoint.
//!
//! Every stage writes a manifest with the fully resolved config next to its
//! outputs, so a run can be replayed exactly.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sigclass::dnn::Checkpoint;
use sigclass::fuse_select::{
    analyze_selection, compute_selection, default_max_classes_per_bin, fuse, FeatureMask, FusionWeights,
    SelectionReport, SpectrumRow, DEFAULT_THRESHOLD,
};
use sigclass::rng::{derive_seed, tag};
use sigclass::spectral::{build_heatmap, extract_channel_blocks, write_heatmap, HeatMap, SpectrumAnalyzer};
use sigclass::synthgen::{
    build_group_profiles_with, read_profiles, read_recording, standard_roster, synthesize_recording,
    write_profiles, write_recording, Group, ProfileOptions, Recording, SensorChannel, TargetProfile,
    DEFAULT_JITTER_HZ, DEFAULT_SAMPLE_RATE_HZ,
};
use sigclass::trainer::{
    evaluate, load_rows, train, write_rows, Dataset, Evaluation, RunLog, TrainConfig, TrainResult,
};
use sigclass::dnn::DEFAULT_LEARN_RATE;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Training(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Training(_) => 3,
        }
    }
}

impl From<sigclass::Error> for CliError {
    fn from(e: sigclass::Error) -> Self {
        use sigclass::Error as E;
        let msg = e.to_string();
        match e {
            E::Config(_) => CliError::Usage(msg),
            E::Validation(_) | E::Parse { .. } | E::Io { .. } | E::Checkpoint(_) => CliError::Data(msg),
            E::Selection(_) | E::Numerical(_) => CliError::Training(msg),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn ensure_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))
}

/// Everything a pipeline run depends on. Flat key-value TOML on disk; any
/// key left out takes its default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub group: Group,
    pub seed: u64,
    pub out: PathBuf,
    /// Custom profile file; when absent profiles are generated from `seed`.
    pub profiles: Option<PathBuf>,

    pub sample_rate_hz: u32,
    pub duration_s: f64,
    pub trials: usize,
    /// Target row count; sets the blocks per recording when that is zero.
    pub rows: usize,
    pub blocks_per_recording: usize,
    pub heatmap_blocks: usize,

    pub noise_rms: f64,
    pub min_amplitude: f64,
    pub max_amplitude: f64,
    pub jitter_hz: f64,
    pub min_line_sep_hz: u32,

    /// Fused channels; empty means the group's default set.
    pub fusion_channels: Vec<String>,
    /// Per-channel weights, parallel to the fused channels; empty means uniform.
    pub fusion_weights: Vec<f64>,
    pub threshold: f64,
    /// Zero means the default for the class count.
    pub max_classes_per_bin: usize,

    pub train_fraction: f64,
    pub batch_size: usize,
    pub runs: usize,
    pub learn_rate: f64,
    pub normalize_rows: bool,
    pub stratified: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let p = ProfileOptions::default();
        let t = TrainConfig::default();
        Self {
            group: Group::Group2,
            seed: 1,
            out: PathBuf::from("out"),
            profiles: None,
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
            duration_s: 15.0,
            trials: 5,
            rows: 1000,
            blocks_per_recording: 0,
            heatmap_blocks: 20,
            noise_rms: p.noise_rms,
            min_amplitude: p.min_amplitude,
            max_amplitude: p.max_amplitude,
            jitter_hz: DEFAULT_JITTER_HZ,
            min_line_sep_hz: p.min_line_sep_hz,
            fusion_channels: Vec::new(),
            fusion_weights: Vec::new(),
            threshold: DEFAULT_THRESHOLD,
            max_classes_per_bin: 0,
            train_fraction: t.train_fraction,
            batch_size: t.batch_size,
            runs: t.runs,
            learn_rate: DEFAULT_LEARN_RATE,
            normalize_rows: t.normalize_rows,
            stratified: t.stratified,
        }
    }
}

impl PipelineConfig {
    pub fn for_group(group: Group) -> Self {
        Self {
            group,
            ..Self::default()
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Usage(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.rows == 0 && self.blocks_per_recording == 0 {
            return bad("either rows or blocks_per_recording must be positive".into());
        }
        if !self.fusion_weights.is_empty() && self.fusion_weights.len() != self.fusion_channel_ids().len() {
            return bad(format!(
                "{} fusion weights for {} channels",
                self.fusion_weights.len(),
                self.fusion_channel_ids().len()
            ));
        }
        self.train_config().validate()?;
        self.fusion().validate()?;
        Ok(())
    }

    pub fn profile_options(&self) -> ProfileOptions {
        ProfileOptions {
            noise_rms: self.noise_rms,
            min_amplitude: self.min_amplitude,
            max_amplitude: self.max_amplitude,
            jitter_hz: self.jitter_hz,
            min_line_sep_hz: self.min_line_sep_hz,
            ..ProfileOptions::default()
        }
    }

    pub fn fusion_channel_ids(&self) -> Vec<String> {
        if self.fusion_channels.is_empty() {
            self.group.selected_channels().iter().map(|s| s.to_string()).collect()
        } else {
            self.fusion_channels.clone()
        }
    }

    pub fn fusion(&self) -> FusionWeights {
        let channels = self.fusion_channel_ids();
        let mut w = FusionWeights::uniform(&channels);
        if !self.fusion_weights.is_empty() {
            w.weights = channels.iter().cloned().zip(self.fusion_weights.iter().copied()).collect();
        }
        w
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            train_fraction: self.train_fraction,
            batch_size: self.batch_size,
            runs: self.runs,
            learn_rate: self.learn_rate,
            threshold: self.threshold,
            seed: derive_seed(self.seed, &[tag("train")]),
            normalize_rows: self.normalize_rows,
            stratified: self.stratified,
            ..TrainConfig::default()
        }
    }

    pub fn blocks_for(&self, labels: usize) -> usize {
        if self.blocks_per_recording > 0 {
            self.blocks_per_recording
        } else {
            let recordings = (labels * self.trials).max(1);
            ((self.rows as f64 / recordings as f64).round() as usize).max(1)
        }
    }

    pub fn max_classes_for(&self, classes: usize) -> usize {
        if self.max_classes_per_bin > 0 {
            self.max_classes_per_bin
        } else {
            default_max_classes_per_bin(classes)
        }
    }

    pub fn target_profiles(&self) -> CliResult<Vec<TargetProfile>> {
        match &self.profiles {
            Some(path) => Ok(read_profiles(path)?),
            None => Ok(build_group_profiles_with(self.group, &self.profile_options(), self.seed)?),
        }
    }

    fn recording_seed(&self, label: &str, trial: usize) -> u64 {
        derive_seed(self.seed, &[tag("recording"), tag(label), trial as u64])
    }

    fn block_seed(&self, label: &str, trial: usize) -> u64 {
        derive_seed(self.seed, &[tag("blocks"), tag(label), trial as u64])
    }

    fn heatmap_seed(&self, label: &str, trial: usize) -> u64 {
        derive_seed(self.seed, &[tag("heatmap"), tag(label), trial as u64])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingEntry {
    pub label: String,
    pub trial: usize,
    pub file: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub config: PipelineConfig,
    pub profiles_file: String,
    #[serde(rename = "recording")]
    pub recordings: Vec<RecordingEntry>,
}

#[derive(Debug, Serialize)]
struct StageManifest<'a> {
    stage: &'a str,
    outputs: Vec<String>,
    config: &'a PipelineConfig,
}

fn write_stage_manifest(cfg: &PipelineConfig, stage: &str, outputs: &[&str]) -> CliResult<PathBuf> {
    let path = cfg.out.join(format!("manifest-{stage}.toml"));
    let m = StageManifest {
        stage,
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        config: cfg,
    };
    write_file(&path, toml::to_string(&m).expect("manifest serializes"))?;
    Ok(path)
}

pub const SYNTH_MANIFEST: &str = "manifest-synth.toml";
pub const ROWS_FILE: &str = "rows.csv";
pub const CHECKPOINT_FILE: &str = "model.ckpt";
pub const RUNLOG_FILE: &str = "runlog.csv";
pub const CONFUSION_FILE: &str = "confusion.csv";
pub const SELECTION_FILE: &str = "selection.csv";
pub const MASK_FILE: &str = "mask.txt";

fn full_setup() -> Vec<SensorChannel> {
    standard_roster()
}

/// Writes profiles, one recording file per (profile, trial), and a manifest.
pub fn cmd_synth(cfg: &PipelineConfig) -> CliResult<SynthManifest> {
    cfg.validate()?;
    let rec_dir = cfg.out.join("recordings");
    ensure_dir(&rec_dir)?;
    let profiles = cfg.target_profiles()?;
    let profiles_file = "profiles.toml".to_string();
    write_profiles(&cfg.out.join(&profiles_file), &profiles)?;
    let setup = full_setup();
    let mut recordings = Vec::new();
    for profile in &profiles {
        for trial in 0..cfg.trials {
            let seed = cfg.recording_seed(&profile.label, trial);
            let rec = synthesize_recording(profile, &setup, cfg.duration_s, cfg.sample_rate_hz, seed)?;
            let file = format!("recordings/{}_{trial}.rec", profile.label);
            write_recording(&cfg.out.join(&file), &rec)?;
            log::info!("wrote {file}");
            recordings.push(RecordingEntry {
                label: profile.label.clone(),
                trial,
                file,
                seed,
            });
        }
    }
    let manifest = SynthManifest {
        config: cfg.clone(),
        profiles_file,
        recordings,
    };
    write_file(
        &cfg.out.join(SYNTH_MANIFEST),
        toml::to_string(&manifest).expect("manifest serializes"),
    )?;
    Ok(manifest)
}

fn read_synth_manifest(cfg: &PipelineConfig) -> CliResult<SynthManifest> {
    let path = cfg.out.join(SYNTH_MANIFEST);
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Data(format!("{}: {e} (run `synth` first)", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Extracts blocks from one recording and fuses each block into a row.
pub fn recording_rows(
    cfg: &PipelineConfig,
    rec: &Recording,
    trial: usize,
    blocks: usize,
    analyzer: &mut SpectrumAnalyzer,
) -> CliResult<Vec<SpectrumRow>> {
    let weights = cfg.fusion();
    let ids: Vec<&str> = weights.selected_channels.iter().map(String::as_str).collect();
    let per_channel = extract_channel_blocks(rec, &ids, blocks, cfg.block_seed(&rec.label, trial))?;
    let mut rows = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let spectra = per_channel
            .iter()
            .map(|ch| analyzer.magnitude_spectrum(&ch[b]))
            .collect::<sigclass::Result<Vec<_>>>()?;
        rows.push(fuse(&spectra, &weights)?);
    }
    Ok(rows)
}

/// Builds the fused rows straight from the profiles without touching disk.
/// Produces exactly what `synth` followed by `rows` writes.
pub fn generate_rows(cfg: &PipelineConfig) -> CliResult<Vec<SpectrumRow>> {
    cfg.validate()?;
    let profiles = cfg.target_profiles()?;
    let fused = cfg.fusion_channel_ids();
    // Channel streams are seeded per channel id, so a reduced setup renders
    // the fused channels identically.
    let setup: Vec<SensorChannel> = full_setup()
        .into_iter()
        .filter(|c| fused.contains(&c.id))
        .collect();
    let blocks = cfg.blocks_for(profiles.len());
    let mut analyzer = SpectrumAnalyzer::new();
    let mut rows = Vec::new();
    for profile in &profiles {
        let mut profile = profile.clone();
        profile.lines.retain(|ch, _| fused.contains(ch));
        for trial in 0..cfg.trials {
            let rec = synthesize_recording(
                &profile,
                &setup,
                cfg.duration_s,
                cfg.sample_rate_hz,
                cfg.recording_seed(&profile.label, trial),
            )?;
            rows.extend(recording_rows(cfg, &rec, trial, blocks, &mut analyzer)?);
        }
    }
    Ok(rows)
}

/// Reads every recording listed by `synth` and writes the 301-column rows.
pub fn cmd_rows(cfg: &PipelineConfig) -> CliResult<Vec<SpectrumRow>> {
    cfg.validate()?;
    let manifest = read_synth_manifest(cfg)?;
    let labels: Vec<&str> = {
        let mut v: Vec<&str> = Vec::new();
        for r in &manifest.recordings {
            if !v.contains(&r.label.as_str()) {
                v.push(&r.label);
            }
        }
        v
    };
    let blocks = cfg.blocks_for(labels.len());
    let mut analyzer = SpectrumAnalyzer::new();
    let mut rows = Vec::new();
    for entry in &manifest.recordings {
        let rec = read_recording(&cfg.out.join(&entry.file))?;
        rows.extend(recording_rows(cfg, &rec, entry.trial, blocks, &mut analyzer)?);
        log::info!("{}: {blocks} blocks", entry.file);
    }
    write_rows(&cfg.out.join(ROWS_FILE), &rows)?;
    write_stage_manifest(cfg, "rows", &[ROWS_FILE])?;
    Ok(rows)
}

/// One heat map per call: all channels of every recording of `label`, each
/// block a row.
pub fn cmd_heatmap(cfg: &PipelineConfig, label: &str) -> CliResult<HeatMap> {
    cfg.validate()?;
    let manifest = read_synth_manifest(cfg)?;
    let entries: Vec<_> = manifest.recordings.iter().filter(|r| r.label == label).collect();
    if entries.is_empty() {
        return Err(CliError::Usage(format!("no recordings for label {label:?}")));
    }
    let mut analyzer = SpectrumAnalyzer::new();
    let mut per_channel: Vec<Vec<(usize, sigclass::spectral::Spectrum)>> = Vec::new();
    for entry in &entries {
        let rec = read_recording(&cfg.out.join(&entry.file))?;
        let ids: Vec<&str> = rec.channel_ids.iter().map(String::as_str).collect();
        let blocks = extract_channel_blocks(&rec, &ids, cfg.heatmap_blocks.max(1), cfg.heatmap_seed(label, entry.trial))?;
        per_channel.resize_with(blocks.len(), Vec::new);
        for (slot, ch_blocks) in per_channel.iter_mut().zip(&blocks) {
            for b in ch_blocks {
                slot.push((entry.trial, analyzer.magnitude_spectrum(b)?));
            }
        }
    }
    let spectra: Vec<_> = per_channel.into_iter().flatten().collect();
    let map = build_heatmap(&spectra)?;
    let dir = cfg.out.join("heatmaps");
    ensure_dir(&dir)?;
    let pgm = format!("heatmaps/{label}.pgm");
    let csv = format!("heatmaps/{label}.csv");
    write_heatmap(&cfg.out.join(&pgm), &cfg.out.join(&csv), &map)?;
    write_stage_manifest(cfg, &format!("heatmap-{label}"), &[&pgm, &csv])?;
    Ok(map)
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub mask: FeatureMask,
    pub report: SelectionReport,
    pub result: TrainResult,
    pub test: Evaluation,
    pub vocab: Vec<String>,
}

impl TrainOutput {
    pub fn runlog(&self) -> &RunLog {
        &self.result.log
    }

    pub fn checkpoint(&self, normalize_rows: bool) -> CliResult<Checkpoint> {
        Ok(Checkpoint::new(
            self.result.params.clone(),
            self.mask.clone(),
            self.vocab.clone(),
            normalize_rows,
        )?)
    }
}

/// Selection, training and test-set evaluation on in-memory rows.
pub fn run_training(cfg: &PipelineConfig, ds: &Dataset) -> CliResult<TrainOutput> {
    cfg.validate()?;
    let max_classes = cfg.max_classes_for(ds.label_vocab.len());
    let (mask, report) = compute_selection(&ds.rows, cfg.threshold, max_classes)?;
    let tcfg = cfg.train_config();
    let result = train(ds, &mask, &tcfg)?;
    let test_rows: Vec<SpectrumRow> = result.split.test.iter().map(|&i| ds.rows[i].clone()).collect();
    let test = evaluate(&result.params, &test_rows, &mask, &ds.label_vocab, tcfg.normalize_rows)?;
    Ok(TrainOutput {
        mask,
        report,
        result,
        test,
        vocab: ds.label_vocab.clone(),
    })
}

pub fn mask_to_text(mask: &FeatureMask) -> String {
    let bins: Vec<String> = mask.kept().iter().map(usize::to_string).collect();
    format!("{}\n", bins.join(","))
}

/// Loads `rows.csv`, trains, and writes checkpoint, run log, confusion
/// matrix, selection report and mask.
pub fn cmd_train(cfg: &PipelineConfig) -> CliResult<TrainOutput> {
    cfg.validate()?;
    ensure_dir(&cfg.out)?;
    let ds = load_rows(&cfg.out.join(ROWS_FILE))?;
    if ds.label_vocab.len() >= 2 {
        // Written even when selection fails.
        if let Ok(report) = analyze_selection(&ds.rows, cfg.threshold, cfg.max_classes_for(ds.label_vocab.len())) {
            write_file(&cfg.out.join(SELECTION_FILE), report.to_csv())?;
        }
    }
    let out = run_training(cfg, &ds)?;
    out.checkpoint(cfg.normalize_rows)?.save(&cfg.out.join(CHECKPOINT_FILE))?;
    write_file(&cfg.out.join(RUNLOG_FILE), out.runlog().to_csv())?;
    write_file(&cfg.out.join(CONFUSION_FILE), out.test.confusion.to_csv())?;
    write_file(&cfg.out.join(MASK_FILE), mask_to_text(&out.mask))?;
    write_stage_manifest(
        cfg,
        "train",
        &[CHECKPOINT_FILE, RUNLOG_FILE, CONFUSION_FILE, SELECTION_FILE, MASK_FILE],
    )?;
    Ok(out)
}

/// Scores a saved checkpoint on a rows file (all rows).
pub fn cmd_eval(cfg: &PipelineConfig, checkpoint: &Path, rows: &Path) -> CliResult<Evaluation> {
    let ck = Checkpoint::load(checkpoint)?;
    let ds = load_rows(rows)?;
    if let Some(l) = ds.label_vocab.iter().find(|l| !ck.vocab.contains(l)) {
        return Err(CliError::Data(format!("label {l:?} is unknown to the checkpoint")));
    }
    let ev = evaluate(&ck.params, &ds.rows, &ck.mask, &ck.vocab, ck.normalize_rows)?;
    ensure_dir(&cfg.out)?;
    write_file(&cfg.out.join("eval_confusion.csv"), ev.confusion.to_csv())?;
    write_stage_manifest(cfg, "eval", &["eval_confusion.csv"])?;
    Ok(ev)
}
