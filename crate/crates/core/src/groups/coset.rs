use super::{GroupElem, GroupError, GroupHandle, Perm, SemidirectElem};
use crate::groups::FWord;

/// Subgroups with a decidable membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subgroup {
    /// `kZ ⊂ Z`.
    Multiples(i64),
    /// `F_n ⊂ F_n ⋊ S_n`: trivial permutation part.
    FreePart,
}

/// Finite-index subgroup `H ⊂ G` with left coset representatives
/// `g_1 = e, ..., g_r`.
#[derive(Debug, Clone)]
pub struct CosetSystem {
    group: GroupHandle,
    subgroup: Subgroup,
    reps: Vec<GroupElem>,
}

impl CosetSystem {
    pub fn new(group: GroupHandle, subgroup: Subgroup, reps: Vec<GroupElem>) -> Result<Self, GroupError> {
        let sys = Self { group, subgroup, reps };
        sys.validate()?;
        Ok(sys)
    }

    /// `kZ ⊂ Z` with representatives `t^0, ..., t^{k-1}`.
    pub fn z_kz(k: i64) -> Result<Self, GroupError> {
        if k < 1 {
            return Err(GroupError::Malformed(format!("index {k} must be positive")));
        }
        Self::new(GroupHandle::Z, Subgroup::Multiples(k), (0..k).map(GroupElem::Int).collect())
    }

    /// `F_n ⊂ F_n ⋊ S_n` with representatives `(e, σ)`, identity first.
    pub fn fn_sn(n: usize) -> Result<Self, GroupError> {
        let reps = Perm::all(n)
            .into_iter()
            .map(|p| GroupElem::Semi(SemidirectElem { word: FWord::identity(), perm: p }))
            .collect();
        Self::new(GroupHandle::FnSn(n), Subgroup::FreePart, reps)
    }

    /// Built-in systems by name: `z-2z`, `z-<k>z`, `f2-s2`, `f<n>-s<n>`.
    pub fn builtin(name: &str) -> Result<Self, GroupError> {
        let bad = || GroupError::Malformed(format!("unknown coset system '{name}'"));
        if let Some(k) = name.strip_prefix("z-").and_then(|s| s.strip_suffix('z')) {
            return Self::z_kz(k.parse().map_err(|_| bad())?);
        }
        if let Some((a, b)) = name.strip_prefix('f').and_then(|s| s.split_once("-s")) {
            let n: usize = a.parse().map_err(|_| bad())?;
            if b.parse::<usize>().ok() != Some(n) || n == 0 || n > 6 {
                return Err(bad());
            }
            return Self::fn_sn(n);
        }
        Err(bad())
    }

    pub fn group(&self) -> &GroupHandle {
        &self.group
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn reps(&self) -> &[GroupElem] {
        &self.reps
    }

    pub fn index(&self) -> usize {
        self.reps.len()
    }

    pub fn contains(&self, h: &GroupElem) -> Result<bool, GroupError> {
        match (&self.subgroup, self.group.normalize(h)?) {
            (Subgroup::Multiples(k), GroupElem::Int(x)) => Ok(x.rem_euclid(*k) == 0),
            (Subgroup::FreePart, GroupElem::Semi(s)) => Ok(s.perm.is_identity()),
            (s, e) => Err(GroupError::Inconsistent(format!("{s:?} cannot test {e}"))),
        }
    }

    fn validate(&self) -> Result<(), GroupError> {
        let first = self.reps.first().ok_or_else(|| GroupError::Inconsistent("no representatives".into()))?;
        if !self.group.is_identity(first)? {
            return Err(GroupError::Inconsistent("the first representative must be e".into()));
        }
        for (i, a) in self.reps.iter().enumerate() {
            let ainv = self.group.inv(a)?;
            for b in &self.reps[i + 1..] {
                if self.contains(&self.group.mul(&ainv, b)?)? {
                    return Err(GroupError::Inconsistent(format!("{a} and {b} share a coset")));
                }
            }
        }
        Ok(())
    }
}

/// `g g_i H = g_{σ(i)} H` and `h_i = g_{σ(i)}^{-1} g g_i ∈ H`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosetDecomposition {
    pub sigma: Perm,
    pub hs: Vec<GroupElem>,
}

impl CosetDecomposition {
    /// Checks `g_{σ(i)} h_i g_i^{-1} = g` for every `i`.
    pub fn reconstructs(&self, sys: &CosetSystem, g: &GroupElem) -> Result<bool, GroupError> {
        let grp = sys.group();
        let g = grp.normalize(g)?;
        for (i, h) in self.hs.iter().enumerate() {
            let left = grp.mul(&sys.reps[self.sigma.apply(i)], h)?;
            let back = grp.mul(&left, &grp.inv(&sys.reps[i])?)?;
            if back != g || !sys.contains(h)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn coset_decompose(sys: &CosetSystem, g: &GroupElem) -> Result<CosetDecomposition, GroupError> {
    let grp = sys.group();
    let r = sys.index();
    let invs = sys.reps.iter().map(|x| grp.inv(x)).collect::<Result<Vec<_>, _>>()?;
    let mut images = Vec::with_capacity(r);
    let mut hs = Vec::with_capacity(r);
    for gi in &sys.reps {
        let ggi = grp.mul(g, gi)?;
        let mut hit = None;
        for (j, inv) in invs.iter().enumerate() {
            let h = grp.mul(inv, &ggi)?;
            if sys.contains(&h)? {
                if hit.is_some() {
                    return Err(GroupError::Inconsistent(format!("{ggi} lies in two cosets")));
                }
                hit = Some((j, h));
            }
        }
        let (j, h) = hit.ok_or_else(|| GroupError::Inconsistent(format!("{ggi} lies in no coset")))?;
        images.push(j);
        hs.push(h);
    }
    let sigma = Perm::new(images).map_err(|_| GroupError::Inconsistent("coset action is not a permutation".into()))?;
    Ok(CosetDecomposition { sigma, hs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_mod_two() {
        let sys = CosetSystem::builtin("z-2z").unwrap();
        let d = coset_decompose(&sys, &GroupElem::Int(1)).unwrap();
        assert_eq!(d.sigma, Perm::transposition(2, 0, 1));
        assert_eq!(d.hs, vec![GroupElem::Int(0), GroupElem::Int(2)]);
        let d = coset_decompose(&sys, &GroupElem::Int(0)).unwrap();
        assert!(d.sigma.is_identity());
        assert!(d.hs.iter().all(|h| *h == GroupElem::Int(0)));
        let g = sys.group().parse_elem("t^5").unwrap();
        assert!(coset_decompose(&sys, &g).unwrap().reconstructs(&sys, &g).unwrap());
    }

    #[test]
    fn semidirect_index_two() {
        let sys = CosetSystem::builtin("f2-s2").unwrap();
        assert_eq!(sys.index(), 2);
        let g = sys.group().parse_elem("e|2 1").unwrap();
        let d = coset_decompose(&sys, &g).unwrap();
        assert_eq!(d.sigma, Perm::transposition(2, 0, 1));
        assert!(d.hs.iter().all(|h| sys.contains(h).unwrap()));
        assert!(d.reconstructs(&sys, &g).unwrap());
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = crate::par::task_rng(2, 0);
        for name in ["z-2z", "z-5z", "f2-s2", "f3-s3"] {
            let sys = CosetSystem::builtin(name).unwrap();
            for _ in 0..200 {
                let g = sys.group().random(8, &mut rng);
                let d = coset_decompose(&sys, &g).unwrap();
                assert!(d.reconstructs(&sys, &g).unwrap(), "{name}: {g}");
            }
        }
    }

    #[test]
    fn bad_systems_are_rejected() {
        assert!(CosetSystem::new(GroupHandle::Z, Subgroup::Multiples(2), vec![GroupElem::Int(0), GroupElem::Int(2)]).is_err());
        assert!(CosetSystem::new(GroupHandle::Z, Subgroup::Multiples(2), vec![GroupElem::Int(1), GroupElem::Int(0)]).is_err());
        assert!(CosetSystem::builtin("q-2q").is_err());
        // Too few representatives: some element lands in no coset.
        let sys = CosetSystem::new(GroupHandle::Z, Subgroup::Multiples(3), vec![GroupElem::Int(0), GroupElem::Int(1)]).unwrap();
        assert!(matches!(coset_decompose(&sys, &GroupElem::Int(1)), Err(GroupError::Inconsistent(_))));
    }
}
