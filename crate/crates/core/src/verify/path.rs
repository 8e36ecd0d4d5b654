use std::f64::consts::{FRAC_PI_2, PI};

use super::VerifyError;
use crate::algebra::C64;

/// Default minimum distance between a path and the singular points `+-1`.
pub const DEFAULT_CLEARANCE: f64 = 0.1;
/// Default radius of the small loops around `+-1`.
pub const DEFAULT_LOOP_RADIUS: f64 = 0.5;
/// Radius of the loop around both singular points.
pub const OUTER_LOOP_RADIUS: f64 = 2.0;

const SINGULAR_POINTS: [f64; 2] = [1.0, -1.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    Line {
        from: C64,
        to: C64,
    },
    /// `center + radius * exp(i (start_angle + s * sweep))`, `s in [0, 1]`.
    Arc {
        center: C64,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
}

impl Segment {
    pub fn point(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * s,
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => center + C64::from_polar(radius, start_angle + s * sweep),
        }
    }

    /// `dx/ds`
    pub fn tangent(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc {
                radius,
                start_angle,
                sweep,
                ..
            } => C64::new(0.0, sweep) * C64::from_polar(radius, start_angle + s * sweep),
        }
    }

    pub fn start(&self) -> C64 {
        self.point(0.0)
    }

    pub fn end(&self) -> C64 {
        self.point(1.0)
    }

    /// Euclidean distance from the segment to `p`.
    pub fn distance_to(&self, p: C64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let dir = to - from;
                let len_sq = dir.norm_sqr();
                if len_sq == 0.0 {
                    return (p - from).norm();
                }
                let t = ((p - from) * dir.conj()).re / len_sq;
                (p - self.point(t.clamp(0.0, 1.0))).norm()
            }
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let rel = p - center;
                let endpoints = (p - self.start()).norm().min((p - self.end()).norm());
                if rel.norm() == 0.0 {
                    return radius;
                }
                if sweep.abs() >= 2.0 * PI {
                    return (rel.norm() - radius).abs();
                }
                // Angle of p measured from the start, in the sweep direction.
                let mut offset = (rel.arg() - start_angle) * sweep.signum();
                offset = offset.rem_euclid(2.0 * PI);
                if offset <= sweep.abs() {
                    (rel.norm() - radius).abs()
                } else {
                    endpoints
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encircled {
    MinusOne,
    PlusOne,
    Both,
}

/// Piecewise path in the complex `x`-plane avoiding the singular points.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    segments: Vec<Segment>,
    clearance: f64,
}

impl PathSpec {
    pub fn new(segments: Vec<Segment>) -> Self {
        PathSpec {
            segments,
            clearance: DEFAULT_CLEARANCE,
        }
    }

    /// Straight segments through the given waypoints.
    pub fn polyline(points: &[C64]) -> Self {
        let segments = points
            .windows(2)
            .map(|w| Segment::Line {
                from: w[0],
                to: w[1],
            })
            .collect();
        PathSpec::new(segments)
    }

    /// Full circle starting and ending at `center + radius`.
    pub fn circle(center: C64, radius: f64, counterclockwise: bool) -> Self {
        let sweep = if counterclockwise {
            2.0 * PI
        } else {
            -2.0 * PI
        };
        PathSpec::new(vec![Segment::Arc {
            center,
            radius,
            start_angle: 0.0,
            sweep,
        }])
    }

    /// Counterclockwise loop based at `x = 0`. The small loops go straight
    /// to the circle of `radius` about the singular point, around it, and
    /// back; the loop around both runs along the imaginary axis to the
    /// circle of radius [`OUTER_LOOP_RADIUS`] about the origin.
    pub fn loop_around(which: Encircled, radius: f64) -> Self {
        let zero = C64::new(0.0, 0.0);
        let (entry, arc) = match which {
            Encircled::MinusOne => (
                C64::new(-1.0 + radius, 0.0),
                Segment::Arc {
                    center: C64::new(-1.0, 0.0),
                    radius,
                    start_angle: 0.0,
                    sweep: 2.0 * PI,
                },
            ),
            Encircled::PlusOne => (
                C64::new(1.0 - radius, 0.0),
                Segment::Arc {
                    center: C64::new(1.0, 0.0),
                    radius,
                    start_angle: PI,
                    sweep: 2.0 * PI,
                },
            ),
            Encircled::Both => (
                C64::new(0.0, OUTER_LOOP_RADIUS),
                Segment::Arc {
                    center: zero,
                    radius: OUTER_LOOP_RADIUS,
                    start_angle: FRAC_PI_2,
                    sweep: 2.0 * PI,
                },
            ),
        };
        PathSpec::new(vec![
            Segment::Line {
                from: zero,
                to: entry,
            },
            arc,
            Segment::Line {
                from: entry,
                to: zero,
            },
        ])
    }

    pub fn with_clearance(mut self, clearance: f64) -> Self {
        self.clearance = clearance;
        self
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn then(mut self, other: &PathSpec) -> Result<Self, VerifyError> {
        if let (Some(end), Some(start)) = (self.end(), other.start()) {
            if (end - start).norm() > 1e-12 {
                return Err(VerifyError::InvalidPath(format!(
                    "path ends at {end} but the next one starts at {start}"
                )));
            }
        }
        self.segments.extend_from_slice(&other.segments);
        self.clearance = self.clearance.min(other.clearance);
        Ok(self)
    }

    pub fn start(&self) -> Option<C64> {
        self.segments.first().map(Segment::start)
    }

    pub fn end(&self) -> Option<C64> {
        self.segments.last().map(Segment::end)
    }

    pub fn is_closed(&self) -> bool {
        match (self.start(), self.end()) {
            (Some(a), Some(b)) => (a - b).norm() < 1e-12,
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        if !(self.clearance > 0.0) {
            return Err(VerifyError::InvalidPath(format!(
                "clearance must be positive, got {}",
                self.clearance
            )));
        }
        for pair in self.segments.windows(2) {
            if (pair[0].end() - pair[1].start()).norm() > 1e-12 {
                return Err(VerifyError::InvalidPath("path is not continuous".into()));
            }
        }
        for (index, seg) in self.segments.iter().enumerate() {
            for p in SINGULAR_POINTS {
                let distance = seg.distance_to(C64::new(p, 0.0));
                if distance < self.clearance {
                    return Err(VerifyError::ClearanceViolation {
                        segment: index,
                        singular_point: p,
                        distance,
                        clearance: self.clearance,
                    });
                }
            }
        }
        Ok(())
    }
}
