use super::{rational_to_f64, RationalFunction};
use crate::error::{Error, Result};

/// Double-precision evaluator for a fixed rational function.
#[derive(Clone, Debug)]
pub struct CompiledFunction {
    num: Vec<(f64, Vec<(usize, i32)>)>,
    den: Option<Vec<(f64, Vec<(usize, i32)>)>>,
}

fn compile_poly(p: &super::MultiPoly) -> Vec<(f64, Vec<(usize, i32)>)> {
    p.terms()
        .map(|(m, c)| {
            let vars = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (i, e as i32))
                .collect();
            (rational_to_f64(c), vars)
        })
        .collect()
}

fn eval_poly(p: &[(f64, Vec<(usize, i32)>)], x: &[f64]) -> f64 {
    p.iter()
        .map(|(c, vars)| vars.iter().fold(*c, |t, &(i, e)| t * if e == 1 { x[i] } else { x[i].powi(e) }))
        .sum()
}

impl CompiledFunction {
    pub fn new(f: &RationalFunction) -> Self {
        let den = if f.is_polynomial() { None } else { Some(compile_poly(f.denominator())) };
        CompiledFunction { num: compile_poly(f.numerator()), den }
    }

    /// Value at `x`; `Err(Pole)` when the denominator vanishes or the result is not finite.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let n = eval_poly(&self.num, x);
        let v = match &self.den {
            None => n,
            Some(d) => {
                let d = eval_poly(d, x);
                if d == 0.0 {
                    return Err(Error::Pole);
                }
                n / d
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Pole)
        }
    }
}
