use crate::numerics::SymMatrix;

/// `V(A, B) = ⟨A, A⟩⟨B, B⟩ − ⟨A, B⟩²`.
pub fn v_form(g: &SymMatrix, a: &[f64], b: &[f64]) -> f64 {
    let ab = g.inner(a, b);
    g.inner(a, a) * g.inner(b, b) - ab * ab
}

/// `W(A, B; X, Y) = ⟨A, A⟩⟨Y, Y⟩ + ⟨B, B⟩⟨X, X⟩ − 2⟨A, B⟩⟨X, Y⟩`.
pub fn w_form(g: &SymMatrix, a: &[f64], b: &[f64], x: &[f64], y: &[f64]) -> f64 {
    g.inner(a, a) * g.inner(y, y) + g.inner(b, b) * g.inner(x, x) - 2.0 * g.inner(a, b) * g.inner(x, y)
}
