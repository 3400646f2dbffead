//! Goal demarcation: static markers and the "firefly", a dynamic marker whose
//! wandering flight is centred on the hidden goal.
//!
//! The fly keeps a target point sampled uniformly (by area) from the disc of
//! `radius` around the goal, with a height drawn uniformly from
//! `[min_height, max_height]`. Each tick it moves `step_size` toward the
//! target; once within one step it lands on the target and draws a new one.
//! Every position therefore lies on a segment between two points of the
//! sampling cylinder, which keeps the fly inside it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FireflyParams {
    pub radius: f64,
    pub min_height: f64,
    pub max_height: f64,
    /// Meters moved per tick.
    pub step_size: f64,
}

impl FireflyParams {
    pub fn validate(&self) -> Result<(), String> {
        let all = [self.radius, self.min_height, self.max_height, self.step_size];
        if all.iter().any(|v| !v.is_finite()) {
            return Err("firefly parameters must be finite".into());
        }
        if self.radius < 0.0 {
            return Err(format!("radius must be >= 0, got {}", self.radius));
        }
        if self.min_height > self.max_height {
            return Err(format!(
                "minHeight {} exceeds maxHeight {}",
                self.min_height, self.max_height
            ));
        }
        if self.step_size <= 0.0 {
            return Err(format!("stepSize must be > 0, got {}", self.step_size));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FireflyState {
    pub position: Vec3,
    pub target_sample: Vec3,
}

/// A marker placed at the goal, such as an arrow or an exclamation mark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticMarker {
    pub position: Vec3,
    pub kind: String,
}

/// Uniform sample from the flight cylinder around `goal`.
///
/// Draw order is fixed (radius, angle, height) so replays are exact.
pub fn sample_flight_point<R: Rng + ?Sized>(goal: Vec3, params: &FireflyParams, rng: &mut R) -> Vec3 {
    let u: f64 = rng.random();
    let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    let h: f64 = rng.random();
    let r = params.radius * u.sqrt();
    Vec3::new(
        goal.x + r * theta.cos(),
        params.min_height + (params.max_height - params.min_height) * h,
        goal.z + r * theta.sin(),
    )
}

pub fn firefly_init<R: Rng + ?Sized>(goal: Vec3, params: &FireflyParams, rng: &mut R) -> FireflyState {
    let position = sample_flight_point(goal, params, rng);
    let target_sample = sample_flight_point(goal, params, rng);
    FireflyState { position, target_sample }
}

pub fn firefly_advance<R: Rng + ?Sized>(
    state: &FireflyState,
    goal: Vec3,
    params: &FireflyParams,
    rng: &mut R,
) -> FireflyState {
    let delta = state.target_sample - state.position;
    let dist = delta.norm();
    if dist <= params.step_size {
        FireflyState {
            position: state.target_sample,
            target_sample: sample_flight_point(goal, params, rng),
        }
    } else {
        FireflyState {
            position: state.position + delta * (params.step_size / dist),
            target_sample: state.target_sample,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::horizontal_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn block1() -> FireflyParams {
        FireflyParams { radius: 0.75, min_height: 0.75, max_height: 1.25, step_size: 0.005 }
    }

    #[test]
    fn zero_radius_sits_over_goal() {
        let goal = Vec3::floor(-3.0, -1.0);
        let params = FireflyParams { radius: 0.0, ..block1() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = firefly_init(goal, &params, &mut rng);
        assert_eq!((s.position.x, s.position.z), (goal.x, goal.z));
        assert!((0.75..=1.25).contains(&s.position.y));
    }

    #[test]
    fn init_respects_block_parameters() {
        let goal = Vec3::floor(-3.0, -1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let s = firefly_init(goal, &block1(), &mut rng);
            for p in [s.position, s.target_sample] {
                assert!(horizontal_distance(p, goal) <= 0.75);
                assert!((0.75..=1.25).contains(&p.y));
            }
        }
    }

    #[test]
    fn same_seed_same_start() {
        let goal = Vec3::floor(1.0, 2.0);
        let a = firefly_init(goal, &block1(), &mut ChaCha8Rng::seed_from_u64(99));
        let b = firefly_init(goal, &block1(), &mut ChaCha8Rng::seed_from_u64(99));
        assert_eq!(a, b);
    }

    #[test]
    fn reaching_target_resamples() {
        let goal = Vec3::ZERO;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = Vec3::new(0.1, 1.0, 0.1);
        let s = FireflyState { position: p, target_sample: p };
        let next = firefly_advance(&s, goal, &block1(), &mut rng);
        assert_eq!(next.position, p);
        assert_ne!(next.target_sample, p);
        let after = firefly_advance(&next, goal, &block1(), &mut rng);
        assert!(after.position.distance(&next.position) <= 0.005 + 1e-12);
    }

    #[test]
    fn long_run_containment_and_step() {
        let goal = Vec3::floor(-3.0, -1.0);
        let params = FireflyParams { radius: 1.5, ..block1() };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut s = firefly_init(goal, &params, &mut rng);
        for _ in 0..100_000 {
            let next = firefly_advance(&s, goal, &params, &mut rng);
            assert!(next.position.distance(&s.position) <= params.step_size + 1e-12);
            assert!(horizontal_distance(next.position, goal) <= params.radius + params.step_size);
            s = next;
        }
    }

    #[test]
    fn params_validation() {
        assert!(block1().validate().is_ok());
        assert!(FireflyParams { step_size: 0.0, ..block1() }.validate().is_err());
        assert!(FireflyParams { radius: -1.0, ..block1() }.validate().is_err());
        assert!(FireflyParams { min_height: 2.0, ..block1() }.validate().is_err());
    }
}
