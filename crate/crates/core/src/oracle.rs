//! Exact brute-force counts on small boxes, tori and slanted tori, and the suite of
//! identities tying them to walk counts `1^T A^m 1` of the transfer operators.

use std::fmt;

use rug::Integer;
use serde::Serialize;

use crate::constraint::words::WordShape;
use crate::constraint::{hard_square_system, monomer_dimer_system, Boundary, ConstraintSystem};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::one_vertex::{build_one_vertex_2d, build_one_vertex_3d};
use crate::transfer::{build_row_transfer_2d, build_slab_transfer_3d, quadratic_form_count, BoundaryDescriptor};

/// An exact count together with the instance it counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCount {
    pub value: Integer,
    pub instance: String,
}

impl fmt::Display for ExactCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.instance, self.value)
    }
}

impl PartialEq<u64> for ExactCount {
    fn eq(&self, other: &u64) -> bool {
        self.value == *other
    }
}

/// Depth-first count of the colourings of `shape`, cell by cell; `allowed[p]` masks the
/// colours cell `p` may take. Every partial assignment visited counts against `work_limit`.
fn backtrack(shape: &WordShape, allowed: Option<&[u64]>, work_limit: u64, what: &'static str) -> Result<Integer> {
    let len = shape.len();
    let k = shape.k();
    if len == 0 {
        return Ok(Integer::from(1));
    }
    let mut colours = vec![0u8; len];
    let mut next = vec![0usize; len];
    let mut total: u128 = 0;
    let mut work: u64 = 0;
    let mut p = 0usize;
    loop {
        let mut placed = false;
        while next[p] < k {
            let c = next[p];
            next[p] += 1;
            if allowed.is_some_and(|a| (a[p] >> c) & 1 == 0) || !shape.accepts_colours(&colours, p, c) {
                continue;
            }
            work += 1;
            if work > work_limit {
                return Err(Error::WorkLimitExceeded { what, limit: work_limit });
            }
            colours[p] = c as u8;
            if p + 1 == len {
                total += 1;
                continue;
            }
            placed = true;
            break;
        }
        if placed {
            p += 1;
            next[p] = 0;
        } else if p == 0 {
            break;
        } else {
            p -= 1;
        }
    }
    Ok(Integer::from(total))
}

fn dims_text(dims: &[usize]) -> String {
    dims.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

/// Allowable colourings of the box `dims[0] x dims[1] x ...`, axis `i` open or cyclic per `bc[i]`.
pub fn brute_count_box(sys: &ConstraintSystem, dims: &[usize], bc: &[Boundary]) -> Result<ExactCount> {
    brute_count_box_with_limits(sys, dims, bc, &Limits::from_env())
}

pub fn brute_count_box_with_limits(
    sys: &ConstraintSystem,
    dims: &[usize],
    bc: &[Boundary],
    limits: &Limits,
) -> Result<ExactCount> {
    let shape = box_shape(sys, dims, bc)?;
    let value = backtrack(&shape, None, limits.work_limit, "box count")?;
    let bc_text: Vec<String> = bc.iter().map(Boundary::to_string).collect();
    Ok(ExactCount { value, instance: format!("box {} ({})", dims_text(dims), bc_text.join(",")) })
}

fn box_shape(sys: &ConstraintSystem, dims: &[usize], bc: &[Boundary]) -> Result<WordShape> {
    if dims.len() != sys.d() {
        return Err(Error::DimensionMismatch { expected: sys.d(), found: dims.len() });
    }
    if bc.len() != dims.len() {
        return Err(Error::DimensionMismatch { expected: dims.len(), found: bc.len() });
    }
    if dims.contains(&0) {
        return Err(Error::InvalidArgument("box sides must be at least 1".into()));
    }
    Ok(WordShape::grid(sys.axes(), dims, bc))
}

/// Axis-1 chains of length `n q` with `(t(i), t(i+n))` on axis 2: the colourings counted
/// by `1^T S_{n,2}^{(q-1)n} 1`.
pub fn brute_count_slanted_2d(sys: &ConstraintSystem, n: usize, q: usize) -> Result<ExactCount> {
    if sys.d() < 2 || n == 0 || q == 0 {
        return Err(Error::InvalidArgument("slanted 2-D counts need d >= 2 and n, q >= 1".into()));
    }
    let shape = WordShape::chain_with_skips(n * q, &[(1, sys.axis(0)), (n, sys.axis(1))]);
    let value = backtrack(&shape, None, Limits::from_env().work_limit, "slanted count")?;
    Ok(ExactCount { value, instance: format!("slanted n={n} q={q}") })
}

/// Axis-1 chains of length `n1 n2 m` with skip-`n1` axis-2 and skip-`n1 n2` axis-3 pairs.
pub fn brute_count_slanted_3d(sys: &ConstraintSystem, n1: usize, n2: usize, m: usize) -> Result<ExactCount> {
    if sys.d() < 3 || n1 == 0 || n2 == 0 || m == 0 {
        return Err(Error::InvalidArgument("slanted 3-D counts need d >= 3 and positive sizes".into()));
    }
    let shape =
        WordShape::chain_with_skips(n1 * n2 * m, &[(1, sys.axis(0)), (n1, sys.axis(1)), (n1 * n2, sys.axis(2))]);
    let value = backtrack(&shape, None, Limits::from_env().work_limit, "slanted count")?;
    Ok(ExactCount { value, instance: format!("slanted n1={n1} n2={n2} m={m}") })
}

/// Tilings of the box by monomers and axis-parallel dimers, by direct placement.
pub fn brute_count_monomer_dimer(dims: &[usize]) -> Result<ExactCount> {
    const MAX_CELLS: usize = 64;
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument("box sides must be at least 1".into()));
    }
    let cells: usize = dims.iter().product();
    if cells > MAX_CELLS {
        return Err(Error::CapacityExceeded { guard: "monomer-dimer cells", estimate: cells as u128, limit: MAX_CELLS as u64 });
    }
    let strides: Vec<usize> = dims.iter().scan(1, |s, &n| {
        let cur = *s;
        *s *= n;
        Some(cur)
    }).collect();
    let limit = Limits::from_env().work_limit;
    let mut work = 0u64;
    // tilings of the cells not yet covered, first free cell first
    fn place(covered: u64, cells: usize, dims: &[usize], strides: &[usize], work: &mut u64, limit: u64) -> Result<u128> {
        let free = (!covered).trailing_zeros() as usize;
        if free >= cells {
            return Ok(1);
        }
        *work += 1;
        if *work > limit {
            return Err(Error::WorkLimitExceeded { what: "monomer-dimer count", limit });
        }
        let mut total = place(covered | 1 << free, cells, dims, strides, work, limit)?;
        for (axis, &n) in dims.iter().enumerate() {
            let x = (free / strides[axis]) % n;
            let other = free + strides[axis];
            if x + 1 < n && covered & (1 << other) == 0 {
                total += place(covered | 1 << free | 1 << other, cells, dims, strides, work, limit)?;
            }
        }
        Ok(total)
    }
    let start = if cells == 64 { 0 } else { !0u64 << cells };
    let value = place(start, cells, dims, &strides, &mut work, limit)?;
    Ok(ExactCount { value: Integer::from(value), instance: format!("monomer-dimer tilings {}", dims_text(dims)) })
}

/// Colourings of the open box under the monomer–dimer coding in which no dimer half
/// points out of the box: colour `2i-1` needs its `+e_i` neighbour inside, colour `2i`
/// its `-e_i` neighbour.
pub fn monomer_dimer_colour_count(dims: &[usize], same_axis_chain: bool) -> Result<ExactCount> {
    let sys = monomer_dimer_system(dims.len(), same_axis_chain)?;
    let shape = box_shape(&sys, dims, &vec![Boundary::Open; dims.len()])?;
    let k = sys.k();
    let all = (1u64 << k) - 1;
    let cells: usize = dims.iter().product();
    let mut allowed = vec![all; cells];
    let mut stride = 1;
    for (axis, &n) in dims.iter().enumerate() {
        for (cell, mask) in allowed.iter_mut().enumerate() {
            let x = (cell / stride) % n;
            if x + 1 == n {
                *mask &= !(1 << (2 * axis));
            }
            if x == 0 {
                *mask &= !(1 << (2 * axis + 1));
            }
        }
        stride *= n;
    }
    let value = backtrack(&shape, Some(&allowed), Limits::from_env().work_limit, "masked colour count")?;
    Ok(ExactCount { value, instance: format!("monomer-dimer colourings {}", dims_text(dims)) })
}

/// One line of the identity suite; `sum(A^m)` stands for `1^T A^m 1`.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: String,
    pub relation: &'static str,
    pub rhs: String,
    pub holds: bool,
}

fn check(name: String, lhs: &Integer, relation: &'static str, rhs: &Integer) -> IdentityCheck {
    let holds = match relation {
        "=" => lhs == rhs,
        "<=" => lhs <= rhs,
        _ => unreachable!(),
    };
    IdentityCheck { name, lhs: lhs.to_string(), relation, rhs: rhs.to_string(), holds }
}

/// The identity suite for the built-in hard-square (2-D and 3-D) and monomer–dimer
/// (2-D) systems.
pub fn counting_identities(max_n: usize) -> Result<Vec<IdentityCheck>> {
    let mut out = identities_for_system("hard-square", &hard_square_system(2)?, max_n)?;
    out.extend(identities_for_system("monomer-dimer d=2", &monomer_dimer_system(2, true)?, max_n)?);
    out.extend(identities_for_system("hard-square-3d", &hard_square_system(3)?, max_n)?);
    Ok(out)
}

/// Every counting identity and inequality between the operators of `sys` and
/// brute-force counts, for sizes up to `max_n`; 3-D sizes are capped at 3.
pub fn identities_for_system(label: &str, sys: &ConstraintSystem, max_n: usize) -> Result<Vec<IdentityCheck>> {
    let mut out = Vec::new();
    let small = max_n.min(3);
    match sys.d() {
        2 => identities_2d(label, sys, max_n, &mut out)?,
        3 => identities_3d(label, sys, small, &mut out)?,
        _ => {}
    }
    if sys.fingerprint() == monomer_dimer_system(sys.d(), true)?.fingerprint() {
        let side = if sys.d() == 1 { max_n } else if sys.d() == 2 { small } else { small.min(2) };
        let mut dims = vec![1; sys.d()];
        loop {
            let coloured = monomer_dimer_colour_count(&dims, true)?;
            let tilings = brute_count_monomer_dimer(&dims)?;
            out.push(check(
                format!("{label}: masked colourings {} = tilings", dims_text(&dims)),
                &coloured.value,
                "=",
                &tilings.value,
            ));
            // odometer over all boxes with sides in 1..=side
            let Some(axis) = dims.iter().position(|&x| x < side) else { break };
            dims[axis] += 1;
            dims[..axis].fill(1);
        }
    }
    Ok(out)
}

fn identities_2d(label: &str, sys: &ConstraintSystem, max_n: usize, out: &mut Vec<IdentityCheck>) -> Result<()> {
    for n in 1..=max_n {
        let t = build_row_transfer_2d(sys, n, Boundary::Open)?;
        let tp = build_row_transfer_2d(sys, n, Boundary::Periodic)?;
        for q in 1..=max_n {
            let walks = quadratic_form_count(&t, q as u32 - 1);
            let boxed = brute_count_box(sys, &[n, q], &[Boundary::Open; 2])?;
            out.push(check(format!("{label}: sum(T_{n}^{}) = #box {n}x{q}", q - 1), &walks, "=", &boxed.value));
            let walks = quadratic_form_count(&tp, q as u32 - 1);
            let boxed = brute_count_box(sys, &[n, q], &[Boundary::Periodic, Boundary::Open])?;
            out.push(check(format!("{label}: sum(T_{n},per^{}) = #cylinder {n}x{q}", q - 1), &walks, "=", &boxed.value));
        }
    }
    let sandwich = sys.is_isotropic() && sys.is_symmetric();
    for n in 2..=max_n {
        let s = build_one_vertex_2d(sys, n)?;
        let t = build_row_transfer_2d(sys, n, Boundary::Open)?;
        let tp = if sandwich { Some(build_row_transfer_2d(sys, n - 1, Boundary::Periodic)?) } else { None };
        for q in 1..=max_n {
            let steps = ((q - 1) * n) as u32;
            let walks = quadratic_form_count(&s, steps);
            let slanted = brute_count_slanted_2d(sys, n, q)?;
            out.push(check(format!("{label}: sum(S_{n}^{steps}) = #slanted n={n} q={q}"), &walks, "=", &slanted.value));
            let upper = quadratic_form_count(&t, q as u32 - 1);
            out.push(check(format!("{label}: sum(S_{n}^{steps}) <= sum(T_{n}^{})", q - 1), &walks, "<=", &upper));
            if let Some(tp) = &tp {
                let lower = quadratic_form_count(tp, q as u32 - 1);
                out.push(check(format!("{label}: sum(T_{},per^{}) <= sum(S_{n}^{steps})", n - 1, q - 1), &lower, "<=", &walks));
            }
        }
    }
    Ok(())
}

fn identities_3d(label: &str, sys: &ConstraintSystem, small: usize, out: &mut Vec<IdentityCheck>) -> Result<()> {
    for n1 in 1..=small {
        for n2 in 1..=small {
            let r = build_slab_transfer_3d(sys, n1, n2, &BoundaryDescriptor::slab(Boundary::Open, Boundary::Open))?;
            let rp =
                build_slab_transfer_3d(sys, n1, n2, &BoundaryDescriptor::slab(Boundary::Periodic, Boundary::Periodic))?;
            for m in 1..=small {
                let walks = quadratic_form_count(&r, m as u32 - 1);
                let boxed = brute_count_box(sys, &[n1, n2, m], &[Boundary::Open; 3])?;
                out.push(check(
                    format!("{label}: sum(R_({n1},{n2})^{}) = #box {n1}x{n2}x{m}", m - 1),
                    &walks,
                    "=",
                    &boxed.value,
                ));
                let walks = quadratic_form_count(&rp, m as u32 - 1);
                let boxed = brute_count_box(sys, &[n1, n2, m], &[Boundary::Periodic, Boundary::Periodic, Boundary::Open])?;
                out.push(check(
                    format!("{label}: sum(R_({n1},{n2}),per^{}) = #torus-slab {n1}x{n2}x{m}", m - 1),
                    &walks,
                    "=",
                    &boxed.value,
                ));
            }
            if n1 * n2 < 2 {
                continue;
            }
            let p = build_one_vertex_3d(sys, n1, n2)?;
            for m in 1..=small {
                let steps = (n1 * n2 * (m - 1)) as u32;
                let walks = quadratic_form_count(&p, steps);
                let slanted = brute_count_slanted_3d(sys, n1, n2, m)?;
                out.push(check(
                    format!("{label}: sum(P_({n1},{n2})^{steps}) = #slanted {n1}x{n2}x{m}"),
                    &walks,
                    "=",
                    &slanted.value,
                ));
            }
        }
    }
    Ok(())
}
