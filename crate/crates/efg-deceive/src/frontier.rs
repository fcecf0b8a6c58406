//! Piecewise-linear Pareto frontiers in the (follower utility, leader utility)
//! plane.
//!
//! A frontier stores `f(t) = max { u_L : (u_F, u_L) achievable, u_F >= t }`.
//! It is nonincreasing and left-continuous, so it is kept as a run of
//! contiguous linear pieces. For `t` at or left of the first piece's start the
//! value is that start's height; right of the last piece nothing is
//! achievable. Jumps sit between pieces: piece `k` owns `(x0, x1]`, the first
//! piece also owns its left end.

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub x0: Rational,
    pub y0: Rational,
    pub x1: Rational,
    pub y1: Rational,
}

impl Piece {
    fn point(p: &Point) -> Self {
        Piece {
            x0: p.x.clone(),
            y0: p.y.clone(),
            x1: p.x.clone(),
            y1: p.y.clone(),
        }
    }

    fn segment(a: &Point, b: &Point) -> Self {
        Piece {
            x0: a.x.clone(),
            y0: a.y.clone(),
            x1: b.x.clone(),
            y1: b.y.clone(),
        }
    }

    fn degenerate(&self) -> bool {
        self.x0 == self.x1
    }

    /// Height at `t`, for `x0 <= t <= x1`.
    fn at(&self, t: &Rational) -> Rational {
        if self.degenerate() {
            return self.y0.clone();
        }
        &self.y0 + (&self.y1 - &self.y0) * (t - &self.x0) / (&self.x1 - &self.x0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frontier {
    pieces: Vec<Piece>,
}

impl Frontier {
    pub fn point(p: Point) -> Self {
        Frontier {
            pieces: vec![Piece::point(&p)],
        }
    }

    /// The segment from `a` to `b`, where `a.x < b.x` and `a.y > b.y`.
    pub fn bridge(a: &Point, b: &Point) -> Self {
        debug_assert!(a.x < b.x && a.y > b.y);
        Frontier {
            pieces: vec![Piece::segment(a, b)],
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// The point with the highest leader utility (and, among those, the
    /// highest follower utility).
    pub fn top(&self) -> Point {
        let p = &self.pieces[0];
        Point::new(p.x0.clone(), p.y0.clone())
    }

    pub fn max_x(&self) -> &Rational {
        &self.pieces.last().expect("frontiers are nonempty").x1
    }

    /// `f(t)`, or `None` when nothing reaches follower utility `t`.
    pub fn value(&self, t: &Rational) -> Option<Rational> {
        let first = &self.pieces[0];
        if t <= &first.x0 {
            return Some(first.y0.clone());
        }
        let k = self.pieces.partition_point(|p| &p.x1 < t);
        self.pieces.get(k).map(|p| p.at(t))
    }

    /// Right limit `f(t+)`; `None` when `t >= max_x`.
    fn value_right(&self, t: &Rational) -> Option<Rational> {
        let first = &self.pieces[0];
        if t < &first.x0 {
            return Some(first.y0.clone());
        }
        let k = self.pieces.partition_point(|p| &p.x1 <= t);
        self.pieces.get(k).map(|p| p.at(t))
    }

    /// The start point plus every piece's end point.
    pub fn vertices(&self) -> Vec<Point> {
        let mut out = vec![self.top()];
        for p in &self.pieces {
            let v = Point::new(p.x1.clone(), p.y1.clone());
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
        out
    }

    /// Keeps only outcomes with follower utility at least `m`.
    pub fn clip(&self, m: &Rational) -> Option<Frontier> {
        if m <= &self.pieces[0].x0 {
            return Some(self.clone());
        }
        if m > self.max_x() {
            return None;
        }
        let k = self.pieces.partition_point(|p| &p.x1 < m);
        let head = &self.pieces[k];
        let mut pieces = vec![Piece {
            x0: m.clone(),
            y0: head.at(m),
            x1: head.x1.clone(),
            y1: head.y1.clone(),
        }];
        pieces.extend_from_slice(&self.pieces[k + 1..]);
        Some(Frontier::normalized(pieces))
    }

    /// Pointwise maximum.
    pub fn max(&self, other: &Frontier) -> Frontier {
        let mut xs: Vec<&Rational> = self
            .pieces
            .iter()
            .chain(&other.pieces)
            .flat_map(|p| [&p.x0, &p.x1])
            .collect();
        xs.sort();
        xs.dedup();

        let start = xs[0];
        let v0 = better(self.value(start), other.value(start))
            .expect("both defined at the leftmost breakpoint");
        let mut pieces = Vec::new();
        for w in xs.windows(2) {
            let (xl, xr) = (w[0], w[1]);
            let a = self
                .value_right(xl)
                .map(|l| (l, self.value(xr).expect("defined")));
            let b = other
                .value_right(xl)
                .map(|l| (l, other.value(xr).expect("defined")));
            let seg = |(l, r): (Rational, Rational)| Piece {
                x0: xl.clone(),
                y0: l,
                x1: xr.clone(),
                y1: r,
            };
            match (a, b) {
                (None, None) => break,
                (Some(a), None) => pieces.push(seg(a)),
                (None, Some(b)) => pieces.push(seg(b)),
                (Some(a), Some(b)) => {
                    let dl = &a.0 - &b.0;
                    let dr = &a.1 - &b.1;
                    if !dl.is_negative() && !dr.is_negative() {
                        pieces.push(seg(a));
                    } else if !dl.is_positive() && !dr.is_positive() {
                        pieces.push(seg(b));
                    } else {
                        let xc = xl + (xr - xl) * &dl / (&dl - &dr);
                        let (first, second) = if dl.is_positive() { (a, b) } else { (b, a) };
                        let yc = seg((first.0.clone(), first.1)).at(&xc);
                        pieces.push(Piece {
                            x0: xl.clone(),
                            y0: first.0,
                            x1: xc.clone(),
                            y1: yc.clone(),
                        });
                        pieces.push(Piece {
                            x0: xc,
                            y0: yc,
                            x1: xr.clone(),
                            y1: second.1,
                        });
                    }
                }
            }
        }
        if pieces.is_empty() || pieces[0].y0 != v0 {
            pieces.insert(0, Piece::point(&Point::new(start.clone(), v0)));
        }
        Frontier::normalized(pieces)
    }

    fn normalized(pieces: Vec<Piece>) -> Frontier {
        let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            if let Some(last) = out.last_mut() {
                let contiguous = last.x1 == p.x0 && last.y1 == p.y0;
                if contiguous && !last.degenerate() && !p.degenerate() {
                    let cross = (&last.x1 - &last.x0) * (&p.y1 - &p.y0)
                        - (&last.y1 - &last.y0) * (&p.x1 - &p.x0);
                    if cross.is_zero() {
                        last.x1 = p.x1;
                        last.y1 = p.y1;
                        continue;
                    }
                }
                if contiguous && last.degenerate() {
                    *last = p;
                    continue;
                }
            }
            out.push(p);
        }
        // A flat lead-in is dominated by its right end.
        while let Some(first) = out.first() {
            if first.degenerate() || first.y0 != first.y1 {
                break;
            }
            let end = Point::new(first.x1.clone(), first.y1.clone());
            out.remove(0);
            match out.first() {
                Some(next) if next.y0 == end.y => {}
                _ => out.insert(0, Piece::point(&end)),
            }
        }
        Frontier { pieces: out }
    }
}

fn better(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, None) => a,
        (None, b) => b,
    }
}
