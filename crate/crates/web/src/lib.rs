//! WebAssembly bindings for the qgraph browser demo. The page in `www/` loads
//! the generated module and calls these functions.

pub mod demo;

use wasm_bindgen::prelude::*;

fn js_err(msg: String) -> JsValue {
    JsValue::from_str(&msg)
}

#[wasm_bindgen(js_name = loopSpectrum)]
pub fn loop_spectrum(k: usize, l: usize, g: f64, h: f64, z: f64) -> Result<Vec<f64>, JsValue> {
    demo::loop_spectrum(k, l, g, h, z).map_err(js_err)
}

#[wasm_bindgen(js_name = realityMap)]
pub fn reality_map(k: usize, l: usize, z: f64, extent: f64, steps: usize) -> Result<Vec<f64>, JsValue> {
    demo::reality_map(k, l, z, extent, steps).map_err(js_err)
}

#[wasm_bindgen(js_name = alphaCurve)]
pub fn alpha_curve(g: f64, z: f64, alpha_min: f64, alpha_max: f64, steps: usize) -> Result<Vec<f64>, JsValue> {
    demo::alpha_curve(g, z, alpha_min, alpha_max, steps).map_err(js_err)
}

#[wasm_bindgen(js_name = alphaBounds)]
pub fn alpha_bounds(g: f64) -> Result<Vec<f64>, JsValue> {
    demo::alpha_bounds(g).map_err(js_err)
}
