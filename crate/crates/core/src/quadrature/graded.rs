use super::gauss::gauss_legendre;

/// Composite Gauss-Legendre rule on [a, b] with cells refined geometrically
/// toward singular endpoints. Distances to both ends are kept separately so
/// that nodes very close to an endpoint lose no precision.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub from_left: Vec<f64>,
    pub from_right: Vec<f64>,
}

impl GradedRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Σ w f(x, x - a, b - x).
    pub fn integrate_with_gaps(&self, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        (0..self.nodes.len())
            .map(|i| self.weights[i] * f(self.nodes[i], self.from_left[i], self.from_right[i]))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Cells [r^{k+1}, r^k]·len measured from an endpoint, plus the innermost cell.
fn geometric_cells(len: f64, ratio: f64, levels: usize) -> Vec<(f64, f64)> {
    let mut cells = Vec::with_capacity(levels + 1);
    let mut hi = 1.0;
    for _ in 0..levels {
        let lo = hi * ratio;
        cells.push((lo * len, hi * len));
        hi = lo;
    }
    cells.push((0.0, hi * len));
    cells
}

/// Graded rule on [a, b]. `left`/`right` select refinement toward each end;
/// `levels` geometric cells with ratio `ratio` are used on each refined half.
pub fn graded_rule(
    a: f64,
    b: f64,
    left: bool,
    right: bool,
    levels: usize,
    ratio: f64,
    order: usize,
) -> GradedRule {
    let (x, w) = gauss_legendre(order);
    let len = b - a;
    // each cell as (distance from its reference end lo, hi, measured from left?)
    let mut cells: Vec<(f64, f64, bool)> = Vec::new();
    match (left, right) {
        (true, true) => {
            cells.extend(geometric_cells(0.5 * len, ratio, levels).into_iter().map(|(l, h)| (l, h, true)));
            cells.extend(geometric_cells(0.5 * len, ratio, levels).into_iter().map(|(l, h)| (l, h, false)));
        }
        (true, false) => cells.extend(geometric_cells(len, ratio, levels).into_iter().map(|(l, h)| (l, h, true))),
        (false, true) => cells.extend(geometric_cells(len, ratio, levels).into_iter().map(|(l, h)| (l, h, false))),
        (false, false) => {
            let n = levels.max(1);
            let h = len / n as f64;
            cells.extend((0..n).map(|i| (i as f64 * h, (i + 1) as f64 * h, true)));
        }
    }
    let n = cells.len() * order;
    let mut rule = GradedRule {
        nodes: Vec::with_capacity(n),
        weights: Vec::with_capacity(n),
        from_left: Vec::with_capacity(n),
        from_right: Vec::with_capacity(n),
    };
    for (lo, hi, from_a) in cells {
        let r = 0.5 * (hi - lo);
        if r <= 0.0 {
            continue;
        }
        for (xi, wi) in x.iter().zip(&w) {
            // distance from the reference end, computed without cancellation
            let d = if *xi < 0.0 { lo + r * (1.0 + xi) } else { hi - r * (1.0 - xi) };
            let (dl, dr) = if from_a { (d, len - d) } else { (len - d, d) };
            rule.nodes.push(if from_a { a + d } else { b - d });
            rule.weights.push(r * wi);
            rule.from_left.push(dl);
            rule.from_right.push(dr);
        }
    }
    rule
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_endpoint_singularities() {
        let r = graded_rule(0.0, 1.0, true, true, 40, 0.3, 10);
        let v = r.integrate_with_gaps(|_, l, rr| l.powf(-0.5) * rr.powf(-0.3));
        // B(1/2, 0.7)
        assert!((v - 2.505_795_576_340_68).abs() < 1e-11, "{v}");
        let w: f64 = r.weights.iter().sum();
        assert!((w - 1.0).abs() < 1e-14);
    }
}
