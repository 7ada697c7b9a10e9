use std::sync::Arc;

use crate::grassmann::{parse_superfunction, Chart, SuperFunction};

use super::{SuperdomainError, Tensor2, VectorField};

/// An invertible change of coordinates from `source` to `target`.
///
/// `forward[i']` expresses target coordinate `i'` on the source chart and
/// `inverse[i]` expresses source coordinate `i` on the target chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateMap {
    source: Arc<Chart>,
    target: Arc<Chart>,
    forward: Vec<SuperFunction>,
    inverse: Vec<SuperFunction>,
}

impl CoordinateMap {
    pub fn new(
        source: &Arc<Chart>,
        target: &Arc<Chart>,
        forward: Vec<SuperFunction>,
        inverse: Vec<SuperFunction>,
    ) -> Result<Self, SuperdomainError> {
        if forward.len() != target.dim() || inverse.len() != source.dim() {
            return Err(SuperdomainError::ComponentCount {
                expected: target.dim() + source.dim(),
                found: forward.len() + inverse.len(),
            });
        }
        if source.n_even() != target.n_even() || source.n_odd() != target.n_odd() {
            return Err(SuperdomainError::NonInvertibleJacobian("dimensions differ".into()));
        }
        for (i, f) in forward.iter().enumerate() {
            if !f.has_parity(target.parity(i)) {
                return Err(SuperdomainError::ParityViolation(format!("image of `{}` is {f}", target.coord(i).name)));
            }
        }
        for (i, f) in inverse.iter().enumerate() {
            if !f.has_parity(source.parity(i)) {
                return Err(SuperdomainError::ParityViolation(format!("preimage of `{}` is {f}", source.coord(i).name)));
            }
        }
        let map = CoordinateMap { source: source.clone(), target: target.clone(), forward, inverse };
        for (i, f) in map.forward.iter().enumerate() {
            if f.compose(target, &map.inverse)? != SuperFunction::coordinate_at(target, i) {
                return Err(SuperdomainError::NonInvertibleJacobian(format!(
                    "forward and inverse disagree on `{}`",
                    target.coord(i).name
                )));
            }
        }
        for (i, f) in map.inverse.iter().enumerate() {
            if f.compose(source, &map.forward)? != SuperFunction::coordinate_at(source, i) {
                return Err(SuperdomainError::NonInvertibleJacobian(format!(
                    "inverse and forward disagree on `{}`",
                    source.coord(i).name
                )));
            }
        }
        Ok(map)
    }

    /// Builds a map from expression strings.
    pub fn parse(
        source: &Arc<Chart>,
        target: &Arc<Chart>,
        forward: &[&str],
        inverse: &[&str],
    ) -> Result<Self, SuperdomainError> {
        let fwd = forward
            .iter()
            .map(|s| parse_superfunction(s, source).map_err(SuperdomainError::Input))
            .collect::<Result<Vec<_>, _>>()?;
        let inv = inverse
            .iter()
            .map(|s| parse_superfunction(s, target).map_err(SuperdomainError::Input))
            .collect::<Result<Vec<_>, _>>()?;
        CoordinateMap::new(source, target, fwd, inv)
    }

    pub fn identity(chart: &Arc<Chart>) -> Self {
        let coords: Vec<SuperFunction> = (0..chart.dim()).map(|i| SuperFunction::coordinate_at(chart, i)).collect();
        CoordinateMap { source: chart.clone(), target: chart.clone(), forward: coords.clone(), inverse: coords }
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &CoordinateMap) -> Result<CoordinateMap, SuperdomainError> {
        let forward = next
            .forward
            .iter()
            .map(|f| f.compose(&self.source, &self.forward))
            .collect::<Result<Vec<_>, _>>()?;
        let inverse = self
            .inverse
            .iter()
            .map(|f| f.compose(&next.target, &next.inverse))
            .collect::<Result<Vec<_>, _>>()?;
        CoordinateMap::new(&self.source, &next.target, forward, inverse)
    }

    /// Pulls a source function back to the target chart.
    pub fn pull(&self, f: &SuperFunction) -> Result<SuperFunction, SuperdomainError> {
        Ok(f.compose(&self.target, &self.inverse)?)
    }

    /// `J[a'][a] = ∂_{a'} x^a`, on the target chart.
    pub fn jacobian(&self) -> Vec<Vec<SuperFunction>> {
        (0..self.target.dim()).map(|ap| self.inverse.iter().map(|x| x.partial(ap)).collect()).collect()
    }

    /// Components of a vector field in the target coordinates:
    /// `X'^{a'} = X(x'^{a'})` re-expressed on the target chart.
    pub fn transform_vector_field(&self, x: &VectorField) -> Result<VectorField, SuperdomainError> {
        let comps = self
            .forward
            .iter()
            .map(|f| self.pull(&x.try_apply(f)?))
            .collect::<Result<Vec<_>, _>>()?;
        VectorField::new(&self.target, comps)
    }

    /// Components of a rank-two tensor in the target coordinates:
    /// `g'_{a'b'} = Σ (-1)^{ã|J_{b'}^b|} J_{a'}^a J_{b'}^b g_ab`.
    pub fn transform_tensor2(&self, g: &Tensor2) -> Result<Tensor2, SuperdomainError> {
        let j = self.jacobian();
        let n = self.source.dim();
        let pulled: Vec<Vec<SuperFunction>> = g
            .entries()
            .iter()
            .map(|row| row.iter().map(|e| self.pull(e)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        let mut out = Tensor2::zero(&self.target);
        for ap in 0..n {
            for bp in 0..n {
                let mut acc = SuperFunction::zero(&self.target);
                for a in 0..n {
                    if j[ap][a].is_zero() {
                        continue;
                    }
                    for b in 0..n {
                        if j[bp][b].is_zero() || pulled[a][b].is_zero() {
                            continue;
                        }
                        let twisted = j[bp][b].koszul_twist(self.source.parity(a));
                        acc = &acc + &(&(&j[ap][a] * &twisted) * &pulled[a][b]);
                    }
                }
                out.set(ap, bp, acc);
            }
        }
        Ok(out)
    }
}

/// Free-function form of [`CoordinateMap::transform_tensor2`].
pub fn transform_tensor2(g: &Tensor2, map: &CoordinateMap) -> Result<Tensor2, SuperdomainError> {
    map.transform_tensor2(g)
}
