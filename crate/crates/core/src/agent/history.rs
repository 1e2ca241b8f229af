//! Training-curve CSV: one row per episode with header
//! `episode,steps,total_reward,avg_reward_per_step,termination,epsilon`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{EpisodeEnd, EpisodeRecord};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    /// Zero-based episode index.
    pub episode: usize,
    pub steps: usize,
    pub total_reward: f64,
    pub avg_reward_per_step: f64,
    pub termination: EpisodeEnd,
    pub epsilon: f64,
}

impl EpisodeRow {
    pub fn from_record(episode: usize, r: &EpisodeRecord) -> Self {
        EpisodeRow {
            episode,
            steps: r.steps,
            total_reward: r.total_reward,
            avg_reward_per_step: r.average_reward_per_step,
            termination: r.termination,
            epsilon: r.epsilon,
        }
    }

    /// Value of a numeric column by header name.
    pub fn metric(&self, name: &str) -> Option<f64> {
        match name {
            "episode" => Some(self.episode as f64),
            "steps" => Some(self.steps as f64),
            "total_reward" => Some(self.total_reward),
            "avg_reward_per_step" => Some(self.avg_reward_per_step),
            "epsilon" => Some(self.epsilon),
            "success" => Some(if self.termination.is_success() {
                1.0
            } else {
                0.0
            }),
            _ => None,
        }
    }
}

pub fn write_episode_csv<W: Write>(out: W, records: &[EpisodeRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (i, r) in records.iter().enumerate() {
        w.serialize(EpisodeRow::from_record(i, r))?;
    }
    if records.is_empty() {
        w.write_record([
            "episode",
            "steps",
            "total_reward",
            "avg_reward_per_step",
            "termination",
            "epsilon",
        ])?;
    }
    w.flush().map_err(|e| Error::io("<episode csv>", e))
}

pub fn read_episode_csv<R: Read>(input: R) -> Result<Vec<EpisodeRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::Position;

    #[test]
    fn round_trip_with_header() {
        let rec = EpisodeRecord {
            initial: Position::new(1, 1),
            map: 0,
            steps: 4,
            total_reward: -8.5,
            average_reward_per_step: -2.125,
            termination: EpisodeEnd::HitObstacle,
            path: vec![Position::new(1, 1)],
            epsilon: 0.75,
        };
        let mut out = Vec::new();
        write_episode_csv(&mut out, &[rec.clone(), rec]).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "episode,steps,total_reward,avg_reward_per_step,termination,epsilon"
        );
        assert_eq!(
            text.lines().nth(2).unwrap(),
            "1,4,-8.5,-2.125,hit_obstacle,0.75"
        );
        let rows = read_episode_csv(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].metric("avg_reward_per_step"), Some(-2.125));
        assert_eq!(rows[0].metric("success"), Some(0.0));
        assert_eq!(rows[0].metric("nope"), None);
    }

    #[test]
    fn empty_history_still_has_header() {
        let mut out = Vec::new();
        write_episode_csv(&mut out, &[]).unwrap();
        assert!(String::from_utf8(out)
            .unwrap()
            .starts_with("episode,steps,"));
    }
}
