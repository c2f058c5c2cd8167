"""Hot numeric kernels with numba and pure-numpy implementations.

The only loop that dominates runtime in this package is the fused
"synthesize every weight vector and keep the per-direction running
maximum power" reduction (full-scale workload: 2048 realizations x
6446 directions). Both implementations are exposed for the benchmark;
:func:`synth_max_accumulate` dispatches on :data:`arraycov.accel.USE_NUMBA`.

Ties are broken toward the lowest realization index in both paths.
"""

import numpy as np

from .accel import USE_NUMBA, njit

# numpy path materializes at most CHUNK x n_directions x 2 complex samples
_CHUNK = 128


def synthesize_fields(elem_gains, phasors):
    """Coherently combine element fields for a block of weight vectors.

    elem_gains: complex (n_elements, n_directions, 2), phasors: complex
    (n_weights, n_elements) including the amplitude factor. Returns
    complex (n_weights, n_directions, 2).
    """
    n_el, n_dir, _ = elem_gains.shape
    out = phasors @ elem_gains.reshape(n_el, n_dir * 2)
    return out.reshape(phasors.shape[0], n_dir, 2)


def _synth_max_numpy(elem_gains, phasors, best_power, best_index, index_offset):
    n_weights = phasors.shape[0]
    for start in range(0, n_weights, _CHUNK):
        block = synthesize_fields(elem_gains, phasors[start : start + _CHUNK])
        power = np.abs(block[:, :, 0]) ** 2 + np.abs(block[:, :, 1]) ** 2
        local_best = np.argmax(power, axis=0)
        local_power = power[local_best, np.arange(power.shape[1])]
        better = local_power > best_power
        best_power[better] = local_power[better]
        best_index[better] = index_offset + start + local_best[better]


@njit(cache=True)
def _synth_max_numba(elem_gains, phasors, best_power, best_index, index_offset):
    n_weights, n_el = phasors.shape
    n_dir = elem_gains.shape[1]
    for d in range(n_dir):
        run_power = best_power[d]
        run_index = best_index[d]
        for k in range(n_weights):
            acc_t = 0.0 + 0.0j
            acc_p = 0.0 + 0.0j
            for n in range(n_el):
                acc_t += phasors[k, n] * elem_gains[n, d, 0]
                acc_p += phasors[k, n] * elem_gains[n, d, 1]
            p = (
                acc_t.real * acc_t.real
                + acc_t.imag * acc_t.imag
                + acc_p.real * acc_p.real
                + acc_p.imag * acc_p.imag
            )
            if p > run_power:
                run_power = p
                run_index = index_offset + k
        best_power[d] = run_power
        best_index[d] = run_index


def synth_max_accumulate(elem_gains, phasors, best_power, best_index, index_offset):
    """Fold one sub-array's weight enumeration into the running maximum.

    Updates best_power (float64, n_directions) and best_index (int64,
    n_directions) in place; indices are offset by index_offset so that
    several sub-arrays accumulate into one global realization numbering.
    """
    elem_gains = np.ascontiguousarray(elem_gains, dtype=np.complex128)
    phasors = np.ascontiguousarray(phasors, dtype=np.complex128)
    if USE_NUMBA:
        _synth_max_numba(elem_gains, phasors, best_power, best_index, index_offset)
    else:
        _synth_max_numpy(elem_gains, phasors, best_power, best_index, index_offset)
