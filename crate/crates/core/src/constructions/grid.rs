//! Lamplighter grids: the commuting family `f_g(ℓ, m)` indexing a
//! `2^n × 2^n` square inside the lamp part of `C ≀ Z`.

use crate::groups::{Group, GroupElement};

use super::BuildError;

/// `f_g(ℓ, m) = g · Π_{u_i=1} a^{-i} b a^{i-1} · Π_{v_j=1} a^j b^{-1} a^{-j+1}`
/// with `u = bin(ℓ)`, `v = bin(m)`, words 1-indexed and least significant
/// bit first; `a = t`, `b = t·(lamp at origin)`.
pub fn grid_element(
    group: &Group,
    g: &GroupElement,
    n: u32,
    ell: u64,
    m: u64,
) -> Result<GroupElement, BuildError> {
    if ell >= 1 << n || m >= 1 << n {
        return Err(BuildError::Invalid(format!(
            "grid coordinates ({ell}, {m}) outside [0, 2^{n})"
        )));
    }
    let gens: std::collections::BTreeMap<String, GroupElement> =
        group.generators().into_iter().collect();
    let a = &gens["a"];
    let b = &gens["b"];
    let a_inv = group.inverse(a)?;
    let b_inv = group.inverse(b)?;
    let pow = |base: &GroupElement, e: i64| -> Result<GroupElement, BuildError> {
        let unit = if e >= 0 { base.clone() } else { group.inverse(base)? };
        let mut acc = group.identity();
        for _ in 0..e.unsigned_abs() {
            acc = group.multiply(&acc, &unit)?;
        }
        Ok(acc)
    };
    let mut out = g.clone();
    for i in 1..=n as i64 {
        if (ell >> (i - 1)) & 1 == 1 {
            let factor = group.multiply(&group.multiply(&pow(&a_inv, i)?, b)?, &pow(a, i - 1)?)?;
            out = group.multiply(&out, &factor)?;
        }
    }
    for j in 1..=n as i64 {
        if (m >> (j - 1)) & 1 == 1 {
            let factor = group.multiply(&group.multiply(&pow(a, j)?, &b_inv)?, &pow(&a_inv, j - 1)?)?;
            out = group.multiply(&out, &factor)?;
        }
    }
    Ok(out)
}

/// Checks commutation, injectivity and zero shift for the whole
/// `2^n × 2^n` grid at `g`; returns a description of the first violation.
pub fn check_grid(group: &Group, g: &GroupElement, n: u32) -> Result<Option<String>, BuildError> {
    let side = 1u64 << n;
    let mut elems = Vec::with_capacity((side * side) as usize);
    for ell in 0..side {
        for m in 0..side {
            elems.push(((ell, m), grid_element(group, g, n, ell, m)?));
        }
    }
    for (i, ((l1, m1), e1)) in elems.iter().enumerate() {
        if let GroupElement::Lamplighter(lamp) = group.multiply(&group.inverse(g)?, e1)? {
            if lamp.shift != 0 {
                return Ok(Some(format!("f({l1},{m1}) has shift component {}", lamp.shift)));
            }
        }
        for ((l2, m2), e2) in elems.iter().skip(i + 1) {
            if e1 == e2 {
                return Ok(Some(format!("f({l1},{m1}) = f({l2},{m2})")));
            }
            let ab = group.multiply(e1, e2)?;
            let ba = group.multiply(e2, e1)?;
            if ab != ba {
                return Ok(Some(format!("f({l1},{m1}) and f({l2},{m2}) do not commute")));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_cases() {
        let group = Group::lamplighter(vec![2]);
        let g = group.identity();
        assert_eq!(grid_element(&group, &g, 2, 0, 0).unwrap(), g);
        // f(1, 0) = a^{-1} b.
        let gens: std::collections::BTreeMap<String, GroupElement> =
            group.generators().into_iter().collect();
        let want = group
            .multiply(&group.inverse(&gens["a"]).unwrap(), &gens["b"])
            .unwrap();
        assert_eq!(grid_element(&group, &g, 2, 1, 0).unwrap(), want);
        // Out-of-range coordinates.
        assert!(grid_element(&group, &g, 2, 4, 0).is_err());
    }

    #[test]
    fn grid_invariants_small() {
        let group = Group::lamplighter(vec![2]);
        for n in 1..=3u32 {
            assert_eq!(check_grid(&group, &group.identity(), n).unwrap(), None, "n={n}");
        }
        // Also from a nontrivial root and over Z_2^2 lamps.
        let g = group.parse("t^2|lamps@{1}").unwrap();
        assert_eq!(check_grid(&group, &g, 2).unwrap(), None);
        let group2 = Group::lamplighter(vec![2, 2]);
        assert_eq!(check_grid(&group2, &group2.identity(), 2).unwrap(), None);
    }

    #[test]
    fn commutation_example() {
        let group = Group::lamplighter(vec![2]);
        let g = group.identity();
        let x = grid_element(&group, &g, 2, 1, 0).unwrap();
        let y = grid_element(&group, &g, 2, 0, 1).unwrap();
        assert_eq!(group.multiply(&x, &y).unwrap(), group.multiply(&y, &x).unwrap());
    }
}
