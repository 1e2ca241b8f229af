use crate::error::{Error, Result};
use crate::gridworld::{GridMap, Position, ENCODE_ROBOT};
use crate::neuralnet::NetworkArch;

/// A set of same-sized maps expressed as one reference encoding plus
/// per-map cell overrides, ready for [`crate::neuralnet::DeltaForward`].
#[derive(Clone, Debug)]
pub struct TrainingWorld {
    maps: Vec<GridMap>,
    free: Vec<Vec<crate::gridworld::Position>>,
    reference: Vec<f64>,
    diffs: Vec<Vec<(usize, f64)>>,
}

impl TrainingWorld {
    pub fn new(maps: Vec<GridMap>) -> Result<Self> {
        let first = maps
            .first()
            .ok_or_else(|| Error::Config("no training maps".into()))?;
        let (w, h) = (first.width(), first.height());
        if maps.iter().any(|m| m.width() != w || m.height() != h) {
            return Err(Error::Config("training maps differ in size".into()));
        }
        let reference = first.encode_background();
        let diffs = maps
            .iter()
            .map(|m| {
                m.encode_background()
                    .into_iter()
                    .enumerate()
                    .filter(|&(i, v)| v != reference[i])
                    .collect()
            })
            .collect();
        let free = maps.iter().map(GridMap::free_positions).collect::<Vec<_>>();
        if free.iter().any(Vec::is_empty) {
            return Err(Error::Config("a training map has no free cells".into()));
        }
        Ok(TrainingWorld {
            maps,
            free,
            reference,
            diffs,
        })
    }

    pub fn maps(&self) -> &[GridMap] {
        &self.maps
    }

    pub fn map(&self, index: usize) -> &GridMap {
        &self.maps[index]
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn free_positions(&self, index: usize) -> &[Position] {
        &self.free[index]
    }

    /// Network architecture sized for these maps.
    pub fn arch(&self, base: &NetworkArch) -> NetworkArch {
        NetworkArch {
            input_w: self.maps[0].width(),
            input_h: self.maps[0].height(),
            ..*base
        }
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    /// Fills `out` with the cells where the encoding of `robot` on map
    /// `index` differs from the reference.
    pub fn overrides(&self, index: usize, robot: Position, out: &mut Vec<(usize, f64)>) {
        out.clear();
        out.extend_from_slice(&self.diffs[index]);
        let cell = self.maps[index]
            .index_of(robot)
            .expect("robot position on map");
        match out.iter_mut().find(|(c, _)| *c == cell) {
            Some(entry) => entry.1 = ENCODE_ROBOT,
            None => out.push((cell, ENCODE_ROBOT)),
        }
    }
}
