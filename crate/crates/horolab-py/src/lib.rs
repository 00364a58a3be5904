use pyo3::prelude::*;

#[pymodule]
fn horolab_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
