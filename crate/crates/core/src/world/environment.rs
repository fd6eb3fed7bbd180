use serde::{Deserialize, Serialize};

use super::rng::RngStream;
use super::WorldError;
use crate::beca::StimulusKind;
use crate::geometry::{Point, Rect};

/// Bounded ground plane `[0, width] x [0, height]` on `(z, x)`. Its border
/// acts as a fixed obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Frame {
    pub width: f64,
    pub height: f64,
}

impl Default for Frame {
    fn default() -> Self {
        Self {
            width: 100.0,
            height: 100.0,
        }
    }
}

impl Frame {
    pub fn contains_strict(&self, p: Point) -> bool {
        p.z > 0.0 && p.z < self.width && p.x > 0.0 && p.x < self.height
    }

    /// True when a disc of `radius` around `p` stays strictly inside.
    pub fn contains_disc(&self, p: Point, radius: f64) -> bool {
        p.z > radius && p.z < self.width - radius && p.x > radius && p.x < self.height - radius
    }

    pub fn center(&self) -> Point {
        Point::new(self.width / 2.0, self.height / 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Footprint {
    Circle { radius: f64 },
    Rect { half_z: f64, half_x: f64 },
}

impl Footprint {
    pub fn default_for(kind: StimulusKind) -> Self {
        match kind {
            StimulusKind::Obstacle => Footprint::Rect {
                half_z: 2.0,
                half_x: 2.0,
            },
            _ => Footprint::Circle { radius: 0.5 },
        }
    }

    /// Radius of the enclosing circle.
    pub fn reach(&self) -> f64 {
        match *self {
            Footprint::Circle { radius } => radius,
            Footprint::Rect { half_z, half_x } => half_z.hypot(half_x),
        }
    }
}

#[derive(
    Debug,
    Clone,
    Copy,
    PartialEq,
    Eq,
    PartialOrd,
    Ord,
    Hash,
    Serialize,
    Deserialize,
    schemars::JsonSchema,
)]
#[serde(transparent)]
pub struct StimulusId(pub u32);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Stimulus {
    pub id: StimulusId,
    pub kind: StimulusKind,
    pub position: Point,
    pub magnitude: f64,
    pub footprint: Footprint,
}

impl Stimulus {
    /// Footprint of an obstacle as a rectangle. Circular footprints use
    /// their bounding square.
    pub fn blocking_rect(&self) -> Rect {
        match self.footprint {
            Footprint::Rect { half_z, half_x } => Rect::new(self.position, half_z, half_x),
            Footprint::Circle { radius } => Rect::new(self.position, radius, radius),
        }
    }

    pub fn is_obstacle(&self) -> bool {
        self.kind == StimulusKind::Obstacle
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Placement {
    At(Point),
    Random,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Environment {
    #[serde(default)]
    pub frame: Frame,
    #[serde(default)]
    pub stimuli: Vec<Stimulus>,
    #[serde(default)]
    next_id: u32,
}

/// Range of magnitudes drawn for randomly placed stimuli.
pub const RANDOM_MAGNITUDE: (f64, f64) = (1.0, 5.0);
/// Distance kept from the frame border by random placement.
const RANDOM_MARGIN: f64 = 3.0;

impl Environment {
    pub fn new(frame: Frame) -> Self {
        Self {
            frame,
            stimuli: Vec::new(),
            next_id: 0,
        }
    }

    /// Adds a stimulus. Random positions and magnitudes are drawn from
    /// `rng`, position first.
    pub fn add_stimulus(
        &mut self,
        kind: StimulusKind,
        placement: Placement,
        magnitude: Option<f64>,
        footprint: Option<Footprint>,
        rng: &mut RngStream,
    ) -> Result<StimulusId, WorldError> {
        let position = match placement {
            Placement::At(p) => p,
            Placement::Random => Point::new(
                rng.uniform(RANDOM_MARGIN, self.frame.width - RANDOM_MARGIN),
                rng.uniform(RANDOM_MARGIN, self.frame.height - RANDOM_MARGIN),
            ),
        };
        let magnitude = match magnitude {
            Some(m) => m,
            None => rng.uniform(RANDOM_MAGNITUDE.0, RANDOM_MAGNITUDE.1),
        };
        self.insert(
            kind,
            position,
            magnitude,
            footprint.unwrap_or(Footprint::default_for(kind)),
        )
    }

    /// Adds a stimulus at an explicit position.
    pub fn insert(
        &mut self,
        kind: StimulusKind,
        position: Point,
        magnitude: f64,
        footprint: Footprint,
    ) -> Result<StimulusId, WorldError> {
        if !self.frame.contains_strict(position) {
            return Err(WorldError::OutsideFrame {
                z: position.z,
                x: position.x,
            });
        }
        if !(magnitude.is_finite() && magnitude >= 0.0) {
            return Err(WorldError::InvalidMagnitude(magnitude));
        }
        if kind == StimulusKind::Predator || kind == StimulusKind::Prey {
            return Err(WorldError::NotPlaceable(kind));
        }
        let id = StimulusId(self.next_id);
        self.next_id += 1;
        self.stimuli.push(Stimulus {
            id,
            kind,
            position,
            magnitude,
            footprint,
        });
        Ok(id)
    }

    pub fn remove_stimulus(&mut self, id: StimulusId) -> Result<Stimulus, WorldError> {
        let idx = self
            .stimuli
            .iter()
            .position(|s| s.id == id)
            .ok_or(WorldError::UnknownStimulus(id))?;
        Ok(self.stimuli.remove(idx))
    }

    pub fn stimulus(&self, id: StimulusId) -> Option<&Stimulus> {
        self.stimuli.iter().find(|s| s.id == id)
    }

    pub fn stimulus_mut(&mut self, id: StimulusId) -> Option<&mut Stimulus> {
        self.stimuli.iter_mut().find(|s| s.id == id)
    }

    pub fn obstacles(&self) -> impl Iterator<Item = &Stimulus> {
        self.stimuli.iter().filter(|s| s.is_obstacle())
    }

    /// Removes consumables whose magnitude reached zero; returns their ids.
    pub fn remove_depleted(&mut self) -> Vec<StimulusId> {
        let mut gone = Vec::new();
        self.stimuli.retain(|s| {
            let depleted = s.kind.is_consumable() && s.magnitude <= 0.0;
            if depleted {
                gone.push(s.id);
            }
            !depleted
        });
        gone
    }

    /// Does the segment `a..b` cross any obstacle footprint?
    pub fn occluded(&self, a: Point, b: Point, except: Option<StimulusId>) -> bool {
        self.obstacles()
            .filter(|o| Some(o.id) != except)
            .any(|o| o.blocking_rect().intersects_segment(a, b))
    }

    /// Number of stimuli per kind, in kind order.
    pub fn census(&self) -> Vec<(StimulusKind, usize)> {
        StimulusKind::ALL
            .iter()
            .map(|&k| (k, self.stimuli.iter().filter(|s| s.kind == k).count()))
            .filter(|&(_, n)| n > 0)
            .collect()
    }
}
