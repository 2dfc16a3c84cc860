use rand::Rng;

use super::matrix::{axpy, Matrix};
use crate::error::{Error, Result};
use crate::rng::rng_from;

/// `out = weight · x + bias` with `weight` of shape `n × m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

impl LayerParams {
    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            weight: Matrix::zeros(n, m),
            bias: vec![0.0; n],
        }
    }

    pub fn outputs(&self) -> usize {
        self.weight.rows()
    }

    pub fn inputs(&self) -> usize {
        self.weight.cols()
    }
}

/// Input layer `d → d`, hidden layer `d → d`, output layer `d → c`. The first
/// two apply a sigmoid, the last emits raw logits.
#[derive(Debug, Clone, PartialEq)]
pub struct DnnParams {
    pub layers: [LayerParams; 3],
}

/// Gradients share the parameter layout.
pub type Gradients = DnnParams;

impl DnnParams {
    pub fn zeros(d: usize, c: usize) -> Self {
        Self {
            layers: [
                LayerParams::zeros(d, d),
                LayerParams::zeros(d, d),
                LayerParams::zeros(c, d),
            ],
        }
    }

    /// Builds from explicit layers, checking the `d, d, c` shape chain.
    pub fn from_layers(layers: [LayerParams; 3]) -> Result<Self> {
        let d = layers[0].inputs();
        let ok = d >= 1
            && layers[0].outputs() == d
            && layers[1].inputs() == d
            && layers[1].outputs() == d
            && layers[2].inputs() == d
            && layers[2].outputs() >= 1
            && layers.iter().all(|l| l.bias.len() == l.outputs());
        if !ok {
            return Err(Error::Validation("layer shapes must chain d→d→d→c".into()));
        }
        Ok(Self { layers })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn classes(&self) -> usize {
        self.layers[2].outputs()
    }

    pub fn layer_sizes(&self) -> (usize, usize, usize) {
        (self.input_dim(), self.input_dim(), self.classes())
    }

    /// All weight and bias slices, layer by layer, weight before bias.
    pub fn tensors(&self) -> [&[f64]; 6] {
        let [l1, l2, l3] = &self.layers;
        [
            l1.weight.as_slice(),
            &l1.bias,
            l2.weight.as_slice(),
            &l2.bias,
            l3.weight.as_slice(),
            &l3.bias,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 6] {
        let [l1, l2, l3] = &mut self.layers;
        [
            l1.weight.as_mut_slice(),
            &mut l1.bias,
            l2.weight.as_mut_slice(),
            &mut l2.bias,
            l3.weight.as_mut_slice(),
            &mut l3.bias,
        ]
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn same_shape(&self, other: &DnnParams) -> bool {
        self.tensors()
            .iter()
            .zip(other.tensors())
            .all(|(a, b)| a.len() == b.len())
            && self.layer_sizes() == other.layer_sizes()
    }
}

/// Glorot-uniform weights, zero biases.
pub fn init_network(d: usize, c: usize, seed: u64) -> Result<DnnParams> {
    if d < 1 || c < 2 {
        return Err(Error::Validation(format!(
            "network needs d >= 1 and c >= 2, got d={d} c={c}"
        )));
    }
    let mut rng = rng_from(seed);
    let mut p = DnnParams::zeros(d, c);
    for layer in &mut p.layers {
        let limit = (6.0 / (layer.inputs() + layer.outputs()) as f64).sqrt();
        for w in layer.weight.as_mut_slice() {
            *w = rng.random_range(-limit..=limit);
        }
    }
    Ok(p)
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Cached activations of one forward pass, one row per batch item.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    pub input: Matrix,
    pub z1: Matrix,
    pub a1: Matrix,
    pub z2: Matrix,
    pub a2: Matrix,
    pub logits: Matrix,
}

pub fn forward(p: &DnnParams, x: &Matrix) -> Result<ForwardTrace> {
    if x.cols() != p.input_dim() {
        return Err(Error::Validation(format!(
            "input width {} does not match network input {}",
            x.cols(),
            p.input_dim()
        )));
    }
    if x.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("non-finite network input".into()));
    }
    let [l1, l2, l3] = &p.layers;
    let z1 = x.mul_transposed_add(&l1.weight, &l1.bias);
    let a1 = z1.map(sigmoid);
    let z2 = a1.mul_transposed_add(&l2.weight, &l2.bias);
    let a2 = z2.map(sigmoid);
    let logits = a2.mul_transposed_add(&l3.weight, &l3.bias);
    Ok(ForwardTrace {
        input: x.clone(),
        z1,
        a1,
        z2,
        a2,
        logits,
    })
}

/// Logits for one feature vector.
pub fn logits_for(p: &DnnParams, x: &[f64]) -> Result<Vec<f64>> {
    let m = Matrix::from_vec(1, x.len(), x.to_vec())?;
    Ok(forward(p, &m)?.logits.row(0).to_vec())
}

/// Sigmoid cross-entropy of one logit against a 0/1 target, in the form
/// `max(z, 0) − z·y + ln(1 + e^{−|z|})` that never overflows.
pub fn sigmoid_cross_entropy(z: f64, y: f64) -> f64 {
    z.max(0.0) - z * y + (-z.abs()).exp().ln_1p()
}

/// Mean sigmoid cross-entropy over every batch × class element.
pub fn loss(logits: &Matrix, targets: &Matrix) -> Result<f64> {
    if logits.rows() != targets.rows() || logits.cols() != targets.cols() {
        return Err(Error::Validation(format!(
            "logits {}x{} vs targets {}x{}",
            logits.rows(),
            logits.cols(),
            targets.rows(),
            targets.cols()
        )));
    }
    if logits.as_slice().iter().any(|z| !z.is_finite()) {
        return Err(Error::Numerical("non-finite logit".into()));
    }
    let n = logits.as_slice().len();
    if n == 0 {
        return Err(Error::Validation("empty batch".into()));
    }
    let total: f64 = logits
        .as_slice()
        .iter()
        .zip(targets.as_slice())
        .map(|(&z, &y)| sigmoid_cross_entropy(z, y))
        .sum();
    Ok(total / n as f64)
}

/// Output-layer error signal: `(σ(z) − y) / (batch · c)`.
pub fn output_delta(logits: &Matrix, targets: &Matrix) -> Matrix {
    let scale = 1.0 / logits.as_slice().len() as f64;
    let data = logits
        .as_slice()
        .iter()
        .zip(targets.as_slice())
        .map(|(&z, &y)| (sigmoid(z) - y) * scale)
        .collect();
    Matrix::from_vec(logits.rows(), logits.cols(), data).expect("same shape as logits")
}

/// Accumulates `dW = δᵀ·A`, `db = Σδ` for one layer and returns `δ·W`.
fn layer_backward(layer: &LayerParams, delta: &Matrix, input: &Matrix, grad: &mut LayerParams) -> Matrix {
    let mut back = Matrix::zeros(delta.rows(), layer.inputs());
    for b in 0..delta.rows() {
        let a = input.row(b);
        for (i, &d) in delta.row(b).iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            grad.bias[i] += d;
            axpy(d, a, grad.weight.row_mut(i));
            axpy(d, layer.weight.row(i), back.row_mut(b));
        }
    }
    back
}

/// Analytic gradient of the mean loss with respect to every parameter.
pub fn backward(p: &DnnParams, trace: &ForwardTrace, targets: &Matrix) -> Result<Gradients> {
    if targets.rows() != trace.logits.rows() || targets.cols() != trace.logits.cols() {
        return Err(Error::Validation("targets do not match the forward batch".into()));
    }
    let (d, _, c) = p.layer_sizes();
    let mut g = DnnParams::zeros(d, c);
    let [l1, l2, l3] = &p.layers;
    let [g1, g2, g3] = &mut g.layers;

    let delta3 = output_delta(&trace.logits, targets);
    let mut delta2 = layer_backward(l3, &delta3, &trace.a2, g3);
    for (dv, a) in delta2.as_mut_slice().iter_mut().zip(trace.a2.as_slice()) {
        *dv *= a * (1.0 - a);
    }
    let mut delta1 = layer_backward(l2, &delta2, &trace.a1, g2);
    for (dv, a) in delta1.as_mut_slice().iter_mut().zip(trace.a1.as_slice()) {
        *dv *= a * (1.0 - a);
    }
    layer_backward(l1, &delta1, &trace.input, g1);
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prediction {
    Class(usize),
    Unclassified,
}

/// Rounds each sigmoid output at 0.5; a single 1 names the class, anything
/// else is unclassified.
pub fn classify_logits(logits: &[f64]) -> Prediction {
    let mut hit = None;
    for (i, &z) in logits.iter().enumerate() {
        if z > 0.0 {
            if hit.is_some() {
                return Prediction::Unclassified;
            }
            hit = Some(i);
        }
    }
    hit.map_or(Prediction::Unclassified, Prediction::Class)
}

pub fn predict(p: &DnnParams, x: &[f64]) -> Result<Prediction> {
    Ok(classify_logits(&logits_for(p, x)?))
}

/// Fraction of output elements whose rounded sigmoid matches the target bit.
pub fn element_agreement(logits: &Matrix, targets: &Matrix) -> f64 {
    let n = logits.as_slice().len();
    if n == 0 {
        return 0.0;
    }
    let hits = logits
        .as_slice()
        .iter()
        .zip(targets.as_slice())
        .filter(|(&z, &y)| (z > 0.0) == (y > 0.5))
        .count();
    hits as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(w1: f64, b3: f64) -> DnnParams {
        let layer = |w: f64, b: f64| LayerParams {
            weight: Matrix::from_vec(1, 1, vec![w]).unwrap(),
            bias: vec![b],
        };
        DnnParams::from_layers([layer(w1, 0.0), layer(1.0, 0.0), layer(1.0, b3)]).unwrap()
    }

    #[test]
    fn zero_net_outputs_zero_logits() {
        let p = DnnParams::zeros(3, 2);
        let x = Matrix::from_rows(&[[1.0, -2.0, 3.0]]).unwrap();
        let t = forward(&p, &x).unwrap();
        assert!(t.a1.as_slice().iter().all(|&a| a == 0.5));
        assert!(t.a2.as_slice().iter().all(|&a| a == 0.5));
        assert!(t.logits.as_slice().iter().all(|&z| z == 0.0));
    }

    #[test]
    fn hand_evaluated_chain() {
        let p = tiny(2.0, 1.0);
        let t = forward(&p, &Matrix::from_rows(&[[0.0]]).unwrap()).unwrap();
        assert_eq!(t.a1[(0, 0)], 0.5);
        let a2 = 1.0 / (1.0 + (-0.5f64).exp());
        assert!((t.a2[(0, 0)] - a2).abs() < 1e-15);
        assert!((t.a2[(0, 0)] - 0.62246).abs() < 1e-5);
        assert!((t.logits[(0, 0)] - 1.62246).abs() < 1e-5);
    }

    #[test]
    fn batch_shape() {
        let p = init_network(23, 4, 1).unwrap();
        let x = Matrix::zeros(150, 23);
        assert_eq!(forward(&p, &x).unwrap().logits.rows(), 150);
        assert_eq!(forward(&p, &x).unwrap().logits.cols(), 4);
        assert!(forward(&p, &Matrix::zeros(2, 22)).is_err());
    }

    #[test]
    fn init_shapes() {
        let p = init_network(23, 4, 0).unwrap();
        let shapes: Vec<_> = p
            .layers
            .iter()
            .map(|l| (l.weight.rows(), l.weight.cols(), l.bias.len()))
            .collect();
        assert_eq!(shapes, [(23, 23, 23), (23, 23, 23), (4, 23, 4)]);
        let p = init_network(115, 7, 0).unwrap();
        let shapes: Vec<_> = p
            .layers
            .iter()
            .map(|l| (l.weight.rows(), l.weight.cols(), l.bias.len()))
            .collect();
        assert_eq!(shapes, [(115, 115, 115), (115, 115, 115), (7, 115, 7)]);
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let a = init_network(10, 3, 9).unwrap();
        assert_eq!(a, init_network(10, 3, 9).unwrap());
        assert_ne!(a, init_network(10, 3, 10).unwrap());
        let limit = (6.0f64 / 20.0).sqrt();
        assert!(a.layers[0].weight.as_slice().iter().all(|w| w.abs() <= limit));
        assert!(a.layers.iter().all(|l| l.bias.iter().all(|&b| b == 0.0)));
        assert!(init_network(0, 3, 0).is_err());
        assert!(init_network(3, 1, 0).is_err());
    }

    #[test]
    fn loss_references() {
        let ln2 = std::f64::consts::LN_2;
        assert!((sigmoid_cross_entropy(0.0, 1.0) - ln2).abs() < 1e-12);
        assert!((sigmoid_cross_entropy(0.0, 0.0) - ln2).abs() < 1e-12);
        assert!(sigmoid_cross_entropy(1000.0, 1.0) <= 1e-6);
        assert!((sigmoid_cross_entropy(1000.0, 0.0) - 1000.0).abs() < 1e-6);
        assert!((sigmoid_cross_entropy(-1000.0, 1.0) - 1000.0).abs() < 1e-6);
    }

    #[test]
    fn loss_rejects_non_finite() {
        let z = Matrix::from_rows(&[[f64::NAN]]).unwrap();
        let y = Matrix::from_rows(&[[1.0]]).unwrap();
        assert!(matches!(loss(&z, &y), Err(Error::Numerical(_))));
    }

    #[test]
    fn zero_net_output_delta() {
        let logits = Matrix::zeros(5, 3);
        let y = Matrix::from_vec(5, 3, vec![1.0; 15]).unwrap();
        let d = output_delta(&logits, &y);
        assert!(d.as_slice().iter().all(|&v| (v - (0.5 - 1.0) / 15.0).abs() < 1e-15));
    }

    #[test]
    fn zero_input_gives_zero_first_layer_weight_grad() {
        let p = init_network(4, 3, 2).unwrap();
        let x = Matrix::zeros(5, 4);
        let mut y = Matrix::zeros(5, 3);
        for b in 0..5 {
            y[(b, b % 3)] = 1.0;
        }
        let g = backward(&p, &forward(&p, &x).unwrap(), &y).unwrap();
        assert!(g.layers[0].weight.as_slice().iter().all(|&v| v == 0.0));
        assert!(g.layers[0].bias.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn predictions() {
        assert_eq!(classify_logits(&[-5.0, 5.0, -5.0]), Prediction::Class(1));
        assert_eq!(classify_logits(&[-5.0, -5.0, -5.0]), Prediction::Unclassified);
        assert_eq!(classify_logits(&[5.0, 5.0, -5.0]), Prediction::Unclassified);
        assert_eq!(classify_logits(&[0.0, -1.0]), Prediction::Unclassified);
    }

    #[test]
    fn element_agreement_counts_bits() {
        let z = Matrix::from_rows(&[[5.0, -5.0], [5.0, 5.0]]).unwrap();
        let y = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(element_agreement(&z, &y), 0.75);
    }
}
