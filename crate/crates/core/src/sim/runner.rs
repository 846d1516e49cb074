//! Trial orchestration and per-point aggregation.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::codes::CodeSpec;
use crate::decode::{Decoder, DecoderConfig};
use crate::error::{Error, Result};

use super::config::SimConfig;
use super::trial_rng;

/// Trials per scheduling unit.
const CHUNK: u64 = 64;
/// Chunks per round; the stop rule is checked between rounds.
const ROUND_CHUNKS: u64 = 16;

/// Aggregated results at one channel point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// `Eb/N0` in dB, or the crossover or erasure probability.
    pub ebn0_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub fer: f64,
    pub bit_errors: u64,
    pub ber: f64,
    pub avg_sorts: f64,
    pub avg_node_visits: f64,
    pub avg_pruned: f64,
    #[serde(skip)]
    pub wall_time: f64,
}

/// One row per channel point.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub rows: Vec<ReportRow>,
}

/// Mergeable sums over trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    frames: u64,
    frame_errors: u64,
    bit_errors: u64,
    sorts: u64,
    visits: u64,
    pruned: u64,
}

impl Tally {
    fn merge(mut self, o: Self) -> Self {
        self.frames += o.frames;
        self.frame_errors += o.frame_errors;
        self.bit_errors += o.bit_errors;
        self.sorts += o.sorts;
        self.visits += o.visits;
        self.pruned += o.pruned;
        self
    }
}

/// A code, channel family and decoder ready to simulate.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: SimConfig,
    pub spec: CodeSpec,
    pub decoder: DecoderConfig,
}

impl Simulation {
    /// Resolves the code and decoder of `config`, including any rate profile
    /// or threshold construction.
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let spec = config.code.build()?;
        let decoder = config.decoder.build(&spec)?;
        Ok(Self { config, spec, decoder })
    }

    /// Runs every channel point on a pool of `run.workers` threads.
    pub fn run_sweep(&self) -> Result<SimReport> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if self.config.run.workers > 0 {
            builder = builder.num_threads(self.config.run.workers);
        }
        let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
        let points = self.config.channel.points.clone();
        let rows = pool.install(|| {
            points
                .iter()
                .enumerate()
                .map(|(i, &p)| self.run_point(i as u64, p))
                .collect::<Result<Vec<_>>>()
        })?;
        Ok(SimReport { rows })
    }

    /// Simulates one channel point until the trial budget or the frame-error
    /// target is reached. The outcome depends only on the seed, the point
    /// index and the configuration.
    pub fn run_point(&self, snr_index: u64, point: f64) -> Result<ReportRow> {
        let start = Instant::now();
        let channel = self.config.channel.channel(point, self.spec.rate())?;
        let base = Decoder::new(&self.spec, self.decoder.clone())?;
        let run = &self.config.run;
        let mut total = Tally::default();
        let mut next = 0u64;
        while next < run.trials && (run.min_errors == 0 || total.frame_errors < run.min_errors) {
            let end = (next + CHUNK * ROUND_CHUNKS).min(run.trials);
            let chunks: Vec<(u64, u64)> = (next..end)
                .step_by(CHUNK as usize)
                .map(|lo| (lo, (lo + CHUNK).min(end)))
                .collect();
            let round = chunks
                .into_par_iter()
                .map_init(
                    || base.clone(),
                    |decoder, (lo, hi)| self.run_trials(decoder, &channel, snr_index, lo, hi),
                )
                .reduce(Tally::default, Tally::merge);
            total = total.merge(round);
            next = end;
        }
        let frames = total.frames as f64;
        let bits = frames * self.spec.k() as f64;
        Ok(ReportRow {
            ebn0_db: point,
            frames: total.frames,
            frame_errors: total.frame_errors,
            fer: total.frame_errors as f64 / frames,
            bit_errors: total.bit_errors,
            ber: total.bit_errors as f64 / bits,
            avg_sorts: total.sorts as f64 / frames,
            avg_node_visits: total.visits as f64 / frames,
            avg_pruned: total.pruned as f64 / frames,
            wall_time: start.elapsed().as_secs_f64(),
        })
    }

    fn run_trials(
        &self,
        decoder: &mut Decoder,
        channel: &Channel,
        snr_index: u64,
        lo: u64,
        hi: u64,
    ) -> Tally {
        let mut tally = Tally::default();
        let mut data = vec![0u8; self.spec.k()];
        let mut llrs = vec![0.0; self.spec.len()];
        for trial in lo..hi {
            let mut rng = trial_rng(self.config.run.seed, snr_index, trial);
            data.iter_mut().for_each(|b| *b = rng.random_range(0..2));
            let codeword = self.spec.encode(&data).expect("data length matches");
            channel.transmit(&codeword, &mut rng, &mut llrs);
            let out = decoder.decode(&llrs).expect("frame length matches");
            let errors = out.data.iter().zip(&data).filter(|(a, b)| a != b).count() as u64;
            tally.frames += 1;
            tally.frame_errors += u64::from(errors > 0);
            tally.bit_errors += errors;
            tally.sorts += out.counters.sort_ops;
            tally.visits += out.counters.node_visits;
            tally.pruned += out.counters.paths_pruned;
        }
        tally
    }
}
