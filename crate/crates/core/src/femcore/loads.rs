//! Load cases: bulk and surface loads with a common time profile.

use serde::{Deserialize, Serialize};

use super::mesh::{Face, Mesh};
use crate::energy::{BulkLoads, SurfaceLoads};
use crate::error::{Error, Result};
use crate::tensor::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TimeProfile {
    Constant,
    /// Linear ramp from zero to full load over `duration`.
    Ramp { duration: f64 },
    /// Zero before `time`, full load from `time` on.
    Step { time: f64 },
}

impl Default for TimeProfile {
    fn default() -> Self {
        TimeProfile::Constant
    }
}

impl TimeProfile {
    pub fn factor(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Ramp { duration } => (t / duration).clamp(0.0, 1.0),
            TimeProfile::Step { time } => {
                if t >= time {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TimeProfile::Ramp { duration } if !(duration > 0.0 && duration.is_finite()) => {
                Err(Error::InvalidInput("ramp duration must be positive".into()))
            }
            TimeProfile::Step { time } if !time.is_finite() => Err(Error::InvalidInput("step time must be finite".into())),
            _ => Ok(()),
        }
    }
}

/// Exponential decay of the bulk electronic load with depth below a matter
/// face, as for light absorbed from that side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attenuation {
    pub face: Face,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfacePatch {
    pub faces: Vec<Face>,
    #[serde(flatten)]
    pub loads: SurfaceLoads,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoadCase {
    pub bulk: BulkLoads,
    pub attenuation: Option<Attenuation>,
    pub surface: Vec<SurfacePatch>,
    pub profile: TimeProfile,
}

impl LoadCase {
    pub fn none() -> Self {
        LoadCase::default()
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        if let Some(a) = self.attenuation {
            if !(a.length > 0.0 && a.length.is_finite()) {
                return Err(Error::InvalidInput("attenuation length must be positive".into()));
            }
        }
        Ok(())
    }

    /// Bulk loads at material point `x` and time `t`.
    pub fn bulk_at(&self, mesh: &Mesh, x: &Vec3, t: f64) -> BulkLoads {
        let mut b = self.bulk.scaled(self.profile.factor(t));
        if let Some(a) = self.attenuation {
            let ax = a.face.axis();
            let depth = if a.face.sign() > 0.0 { mesh.spec.extents[ax] - x[ax] } else { x[ax] };
            b.electronic = b.electronic * (-depth.max(0.0) / a.length).exp();
        }
        b
    }

    /// Surface loads acting on a matter facet on `face` at time `t`.
    pub fn surface_at(&self, face: Face, t: f64) -> Option<SurfaceLoads> {
        let s = self.profile.factor(t);
        let mut total: Option<SurfaceLoads> = None;
        for p in self.surface.iter().filter(|p| p.faces.contains(&face)) {
            let l = p.loads.scaled(s);
            total = Some(match total {
                None => l,
                Some(acc) => SurfaceLoads {
                    free_charge: acc.free_charge + l.free_charge,
                    electronic: acc.electronic + l.electronic,
                    traction: acc.traction + l.traction,
                },
            });
        }
        total
    }

    pub fn is_time_dependent(&self) -> bool {
        !matches!(self.profile, TimeProfile::Constant)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles() {
        assert_eq!(TimeProfile::Constant.factor(-1.0), 1.0);
        let r = TimeProfile::Ramp { duration: 2.0 };
        assert_eq!(r.factor(0.0), 0.0);
        assert_eq!(r.factor(1.0), 0.5);
        assert_eq!(r.factor(5.0), 1.0);
        let s = TimeProfile::Step { time: 1.0 };
        assert_eq!(s.factor(0.999), 0.0);
        assert_eq!(s.factor(1.0), 1.0);
        assert!(TimeProfile::Ramp { duration: 0.0 }.validate().is_err());
    }
}
