/// Huber loss of residual `z` and its derivative with respect to `z`.
pub fn huber_loss(z: f64, delta: f64) -> (f64, f64) {
    debug_assert!(delta > 0.0);
    if z.abs() <= delta {
        (0.5 * z * z, z)
    } else {
        (delta * z.abs() - 0.5 * delta * delta, delta * z.signum())
    }
}
