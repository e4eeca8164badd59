use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::error::SimError;
use crate::model::UrnSpec;

pub const RNG_ALGORITHM: &str = "ChaCha8";

/// Replacement law of one colour, flattened for sampling.
#[derive(Debug, Clone)]
struct CompiledRow {
    /// Cumulative probabilities; the last entry is replaced by 1.
    cumulative: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    subtracts: bool,
}

/// A spec converted to floating point once, ready for fast stepping.
#[derive(Debug, Clone)]
pub struct CompiledUrn {
    pub q: usize,
    pub activities: Vec<f64>,
    pub initial: Vec<f64>,
    pub integer_valued: bool,
    rows: Vec<CompiledRow>,
}

impl CompiledUrn {
    pub fn new(spec: &UrnSpec) -> Self {
        let rows = spec
            .rows
            .iter()
            .map(|row| {
                let mut acc = 0.0;
                let mut cumulative: Vec<f64> = row
                    .atoms
                    .iter()
                    .map(|a| {
                        acc += a.p.to_f64();
                        acc
                    })
                    .collect();
                if let Some(last) = cumulative.last_mut() {
                    *last = 1.0;
                }
                let vectors = row
                    .atoms
                    .iter()
                    .map(|a| a.v.iter().map(|x| x.to_f64()).collect())
                    .collect();
                let subtracts = row.atoms.iter().any(|a| a.v.iter().any(|x| x.is_negative()));
                CompiledRow {
                    cumulative,
                    vectors,
                    subtracts,
                }
            })
            .collect();
        CompiledUrn {
            q: spec.q(),
            activities: spec.colours.iter().map(|c| c.activity.to_f64()).collect(),
            initial: spec.colours.iter().map(|c| c.initial.to_f64()).collect(),
            integer_valued: spec.is_integer_valued(),
            rows,
        }
    }

    pub fn total_activity(&self, x: &[f64]) -> f64 {
        self.activities.iter().zip(x).map(|(a, x)| a * x).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Status {
    Running,
    /// Total activity reached zero after this many draws.
    Extinct { step: u64 },
    /// The step cap was hit before the horizon.
    Truncated,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Running => "running",
            Status::Extinct { .. } => "extinct",
            Status::Truncated => "truncated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UrnState {
    pub x: Vec<f64>,
    pub drawn: Vec<u64>,
    pub step: u64,
    pub t: f64,
    pub status: Status,
    /// Set once an integer-valued count exceeds 2^53 and is no longer exact.
    pub approximate: bool,
}

impl UrnState {
    pub fn initial(urn: &CompiledUrn) -> Self {
        let status = if urn.total_activity(&urn.initial) > 0.0 {
            Status::Running
        } else {
            Status::Extinct { step: 0 }
        };
        UrnState {
            x: urn.initial.clone(),
            drawn: vec![0; urn.q],
            step: 0,
            t: 0.0,
            status,
            approximate: false,
        }
    }

    pub fn is_running(&self) -> bool {
        self.status == Status::Running
    }
}

const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0;

/// One replicate: its state plus the two random streams that drive it.
#[derive(Debug, Clone)]
pub struct Replicate<'a> {
    pub urn: &'a CompiledUrn,
    pub state: UrnState,
    jump: ChaCha8Rng,
    clock: ChaCha8Rng,
}

impl<'a> Replicate<'a> {
    /// Replicate `index` of the run seeded by `seed`. Draws and atoms come from
    /// stream `2·index`, holding times from stream `2·index + 1`.
    pub fn new(urn: &'a CompiledUrn, seed: u64, index: u64) -> Self {
        let mut jump = ChaCha8Rng::seed_from_u64(seed);
        jump.set_stream(2 * index);
        let mut clock = ChaCha8Rng::seed_from_u64(seed);
        clock.set_stream(2 * index + 1);
        Replicate {
            urn,
            state: UrnState::initial(urn),
            jump,
            clock,
        }
    }

    /// Draws a colour, samples its replacement and updates the state. Returns
    /// the drawn colour, or `None` when the urn is not running.
    pub fn step_discrete(&mut self) -> Result<Option<usize>, SimError> {
        if !self.state.is_running() {
            return Ok(None);
        }
        let urn = self.urn;
        let x = &mut self.state.x;
        let total = urn.total_activity(x);
        let u = self.jump.random::<f64>() * total;
        let mut acc = 0.0;
        let mut colour = usize::MAX;
        let mut last_active = 0;
        for i in 0..urn.q {
            let w = urn.activities[i] * x[i];
            if w > 0.0 {
                last_active = i;
                acc += w;
                if u < acc {
                    colour = i;
                    break;
                }
            }
        }
        if colour == usize::MAX {
            colour = last_active;
        }

        let row = &urn.rows[colour];
        let atom = match row.cumulative.len() {
            0 => None,
            1 => Some(0),
            _ => {
                let v = self.jump.random::<f64>();
                Some(row.cumulative.iter().position(|&c| v < c).unwrap_or(row.cumulative.len() - 1))
            }
        };
        let step = self.state.step + 1;
        if let Some(k) = atom {
            let mut largest = 0.0f64;
            for (xj, dj) in x.iter_mut().zip(&row.vectors[k]) {
                *xj += dj;
                largest = largest.max(*xj);
            }
            if row.subtracts {
                if let Some(j) = x.iter().position(|&v| v < 0.0) {
                    return Err(SimError::NegativeCount { colour: j, step });
                }
            }
            if largest > EXACT_LIMIT && urn.integer_valued {
                self.state.approximate = true;
            }
        }
        self.state.drawn[colour] += 1;
        self.state.step = step;
        if row.subtracts && urn.total_activity(&self.state.x) <= 0.0 {
            self.state.status = Status::Extinct { step };
        }
        Ok(Some(colour))
    }

    /// Waiting time until the next draw, sampled from the clock stream.
    pub fn holding_time(&mut self) -> f64 {
        let rate = self.urn.total_activity(&self.state.x);
        let e: f64 = self.clock.sample(Exp1);
        e / rate
    }

    /// Advances the embedded continuous-time urn by one draw, unless that draw
    /// would happen after `t_max`; in that case the clock is set to `t_max`
    /// and `false` is returned.
    pub fn step_continuous(&mut self, t_max: f64) -> Result<bool, SimError> {
        if !self.state.is_running() {
            self.state.t = self.state.t.max(t_max);
            return Ok(false);
        }
        let dt = self.holding_time();
        if self.state.t + dt > t_max {
            self.state.t = t_max;
            return Ok(false);
        }
        self.state.t += dt;
        self.step_discrete()?;
        Ok(true)
    }

    /// Runs the discrete chain until `n` draws have been made or the urn stops.
    pub fn run_to_step(&mut self, n: u64) -> Result<(), SimError> {
        while self.state.step < n && self.state.is_running() {
            self.step_discrete()?;
        }
        Ok(())
    }

    /// Runs the continuous-time urn up to time `t`, with an optional cap on the
    /// total number of draws.
    pub fn run_to_time(&mut self, t: f64, step_cap: Option<u64>) -> Result<(), SimError> {
        while self.step_continuous(t)? {
            if step_cap.is_some_and(|cap| self.state.step >= cap) {
                if self.state.is_running() {
                    self.state.status = Status::Truncated;
                }
                break;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{r, rv, Atom, ReplacementRow};

    fn minus_minus() -> UrnSpec {
        UrnSpec::deterministic(vec![rv(&["0", "1"]), rv(&["0", "-1"])], rv(&["1", "0"]))
    }

    #[test]
    fn single_colour_is_deterministic() {
        let spec = UrnSpec::deterministic(vec![rv(&["1"])], rv(&["3"]));
        let urn = CompiledUrn::new(&spec);
        let mut rep = Replicate::new(&urn, 1, 0);
        rep.run_to_step(50).unwrap();
        assert_eq!(rep.state.x, vec![53.0]);
        assert_eq!(rep.state.drawn, vec![50]);
    }

    #[test]
    fn minus_minus_parity() {
        let urn = CompiledUrn::new(&minus_minus());
        let mut rep = Replicate::new(&urn, 9, 3);
        for n in 1..=2000u64 {
            rep.step_discrete().unwrap();
            assert_eq!(rep.state.x[1] as u64 % 2, n % 2);
        }
    }

    #[test]
    fn balanced_total_is_exact() {
        let spec = UrnSpec::from_parts(
            rv(&["1", "1"]),
            rv(&["1", "0"]),
            vec![
                ReplacementRow::new(vec![
                    Atom::new(r("1/2"), rv(&["1", "0"])),
                    Atom::new(r("1/2"), rv(&["0", "1"])),
                ]),
                ReplacementRow::deterministic(rv(&["0", "1"])),
            ],
        );
        let urn = CompiledUrn::new(&spec);
        let mut rep = Replicate::new(&urn, 4, 0);
        for n in 1..=1000u64 {
            rep.step_discrete().unwrap();
            assert_eq!(urn.total_activity(&rep.state.x), 1.0 + n as f64);
        }
    }

    #[test]
    fn continuous_jump_chain_matches_discrete() {
        let spec = UrnSpec::deterministic(vec![rv(&["1", "1"]), rv(&["0", "2"])], rv(&["1", "0"]));
        let urn = CompiledUrn::new(&spec);
        let mut cont = Replicate::new(&urn, 11, 5);
        let mut disc = Replicate::new(&urn, 11, 5);
        while cont.step_continuous(3.0).unwrap() {
            disc.step_discrete().unwrap();
            assert_eq!(cont.state.x, disc.state.x);
        }
        assert!(cont.state.step > 10);
        assert_eq!(cont.state.t, 3.0);
    }

    #[test]
    fn white_count_stays_fixed_in_continuous_minus_minus() {
        let urn = CompiledUrn::new(&minus_minus());
        let mut rep = Replicate::new(&urn, 2, 0);
        rep.run_to_time(20.0, None).unwrap();
        assert_eq!(rep.state.x[0], 1.0);
    }

    #[test]
    fn empty_urn_has_no_dynamics() {
        let spec = UrnSpec::deterministic(vec![rv(&["1"])], rv(&["0"]));
        let urn = CompiledUrn::new(&spec);
        let mut rep = Replicate::new(&urn, 0, 0);
        assert_eq!(rep.state.status, Status::Extinct { step: 0 });
        assert_eq!(rep.step_discrete().unwrap(), None);
    }

    #[test]
    fn extinction_is_recorded() {
        let spec = UrnSpec::deterministic(vec![rv(&["-1"])], rv(&["3"]));
        let urn = CompiledUrn::new(&spec);
        let mut rep = Replicate::new(&urn, 0, 0);
        rep.run_to_step(10).unwrap();
        assert_eq!(rep.state.status, Status::Extinct { step: 3 });
    }
}
