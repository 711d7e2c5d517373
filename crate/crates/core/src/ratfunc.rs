//! Rational functions: reduced fractions of polynomials with a monic denominator.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::BaseElem;
use crate::poly::{gcd, Poly, PolyRing};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.ring() != den.ring() {
            return Err(Error::RingMismatch(format!("{} vs {}", num.ring(), den.ring())));
        }
        Ok(RatFunc::normalize(num, den))
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        let den = Poly::one(p.ring());
        RatFunc { num: p, den }
    }

    fn normalize(num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            let one = Poly::one(num.ring());
            return RatFunc { num, den: one };
        }
        let (num, den) = if den.as_constant().is_some() {
            (num, den)
        } else {
            let g = gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
            }
        };
        let lc = den.leading().unwrap().1.inv().unwrap();
        RatFunc { num: num.scale(&lc), den: den.scale(&lc) }
    }

    pub fn ring(&self) -> &PolyRing {
        self.num.ring()
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    /// The numerator when the denominator is 1.
    pub fn as_poly(&self) -> Option<&Poly> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Makes the denominator monic; `num/den` must already be reduced.
    fn monic(num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            return RatFunc::from_poly(num);
        }
        let lc = den.leading().unwrap().1.inv().unwrap();
        RatFunc { num: num.scale(&lc), den: den.scale(&lc) }
    }

    // Henrici: only gcds of the smaller pieces are taken.
    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from_poly(self.num.add(&o.num));
        }
        let g = gcd(&self.den, &o.den);
        if g.is_one() {
            return RatFunc::monic(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den));
        }
        let (b, d) = (self.den.exact_div(&g).unwrap(), o.den.exact_div(&g).unwrap());
        let t = self.num.mul(&d).add(&o.num.mul(&b));
        if t.is_zero() {
            return RatFunc::from_poly(t);
        }
        let g2 = gcd(&t, &g);
        RatFunc::monic(t.exact_div(&g2).unwrap(), b.mul(&o.den.exact_div(&g2).unwrap()))
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from_poly(self.num.mul(&o.num));
        }
        if self.is_zero() || o.is_zero() {
            return RatFunc::from_poly(Poly::zero(self.ring()));
        }
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let num = self.num.exact_div(&g1).unwrap().mul(&o.num.exact_div(&g2).unwrap());
        let den = self.den.exact_div(&g2).unwrap().mul(&o.den.exact_div(&g1).unwrap());
        RatFunc::monic(num, den)
    }

    pub fn scale(&self, c: &BaseElem) -> RatFunc {
        if c.is_zero() {
            return RatFunc::from_poly(Poly::zero(self.ring()));
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFunc::normalize(self.den.clone(), self.num.clone()))
    }

    /// Value at a point, or `None` at a pole.
    pub fn eval(&self, point: &[BaseElem]) -> Option<BaseElem> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(point).mul(&d.inv().unwrap()))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BaseField;
    use crate::poly::parse_ratfunc;
    use proptest::prelude::*;

    #[test]
    fn normal_form_is_structural() {
        let r = PolyRing::new(["t", "u"], BaseField::Rationals);
        let a = parse_ratfunc(&r, "(t^2 - u^2)/(2*t + 2*u)").unwrap();
        let b = parse_ratfunc(&r, "t/2 - u/2").unwrap();
        assert_eq!(a, b);
        assert!(a.denom().is_one());
        let c = parse_ratfunc(&r, "1/(3*t + 6)").unwrap();
        assert_eq!(c.denom().leading().unwrap().1, &BaseField::Rationals.one());
        assert!(a.sub(&b).is_zero());
    }

    #[test]
    fn eval_skips_poles() {
        let r = PolyRing::new(["t"], BaseField::Prime(3));
        let f = parse_ratfunc(&r, "1/(t + 1)").unwrap();
        assert!(f.eval(&[BaseField::Prime(3).from_i64(2)]).is_none());
        assert_eq!(f.eval(&[BaseField::Prime(3).from_i64(0)]).unwrap(), BaseField::Prime(3).one());
    }

    fn small_poly(r: &PolyRing, coeffs: &[i64]) -> Poly {
        let monos = ["1", "t", "u", "t*u", "t^2"];
        let text: Vec<String> = coeffs.iter().zip(monos).filter(|(c, _)| **c != 0).map(|(c, m)| format!("{c}*{m}")).collect();
        if text.is_empty() { Poly::zero(r) } else { Poly::parse(r, &text.join(" + ")).unwrap() }
    }

    proptest! {
        #[test]
        fn arithmetic_matches_unreduced_formulas(
            a in prop::collection::vec(-2i64..3, 5), b in prop::collection::vec(-2i64..3, 5),
            c in prop::collection::vec(-2i64..3, 5), d in prop::collection::vec(-2i64..3, 5),
        ) {
            let r = PolyRing::new(["t", "u"], BaseField::Prime(5));
            let (pa, pb, pc, pd) = (small_poly(&r, &a), small_poly(&r, &b), small_poly(&r, &c), small_poly(&r, &d));
            prop_assume!(!pb.is_zero() && !pd.is_zero());
            let x = RatFunc::new(pa.clone(), pb.clone()).unwrap();
            let y = RatFunc::new(pc.clone(), pd.clone()).unwrap();
            let sum = RatFunc::new(pa.mul(&pd).add(&pc.mul(&pb)), pb.mul(&pd)).unwrap();
            let prod = RatFunc::new(pa.mul(&pc), pb.mul(&pd)).unwrap();
            prop_assert_eq!(x.add(&y), sum);
            prop_assert_eq!(x.mul(&y), prod);
            for z in [x.add(&y), x.mul(&y)] {
                prop_assert!(gcd(z.numer(), z.denom()).is_one() || z.is_zero());
            }
        }
    }
}
