"""
The QFT acts on amplitudes as the classical DFT
===============================================

Applying the QFT matrix to a state gives the same numbers as the classical
transform of its amplitude list. The Hadamard/controlled-phase circuit
builds the same unitary with n(n+1)/2 + n//2 gates.
"""

import numpy as np

from qconv import qsim, spectral

rng = np.random.default_rng(1)

for n in range(1, 9):
    state = qsim.random_state(n, rng)
    via_qft = qsim.apply(qsim.qft_dense(n), state).amplitudes
    via_dft = spectral.dft(state.amplitudes)
    circuit = qsim.qft_circuit(n)
    circuit_err = np.abs(circuit.matrix() - qsim.qft_dense(n).matrix).max()
    print(f"n={n}: |QFT - DFT| = {np.abs(via_qft - via_dft).max():.1e}, "
          f"gates = {circuit.gate_count:2d}, |circuit - dense| = {circuit_err:.1e}")

# the three-qubit circuit, gate by gate
for gate in qsim.qft_circuit(3).gates:
    print(f"  {gate.name:4s} qubits={gate.qubits} angle={gate.angle:.4f}")
