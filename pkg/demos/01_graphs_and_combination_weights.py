"""Build communication graphs and combination weights, and inspect their
spectral properties.

The combination matrix A assigns the weight a_lk that agent k puts on
neighbor l's iterate.  Its Perron eigenvector theta (the unit-sum right
eigenvector at eigenvalue one) decides which agents dominate the network
limit point; |lambda_2(A)| governs how fast the agents' iterates pull
together.
"""

import numpy as np

from adaptnet import (build_hastings, build_metropolis,
                      build_uniform_averaging, is_primitive, perron_vector,
                      random_geometric, ring, second_eigenvalue_magnitude)

# --- a ring and a random geometric graph over the same 8 agents ---------
ring8 = ring(8)
geo8 = random_geometric(8, 0.55, seed=4)
print("ring(8) degrees:     ", [ring8.degree(k) for k in range(8)])
print("geometric degrees:   ", [geo8.degree(k) for k in range(8)])
print("geometric edge list: ", geo8.edges)

# --- Metropolis weights: the uniform-weight workhorse --------------------
a_ring = build_metropolis(ring8)
print("\nMetropolis on ring(8): column sums",
      np.round(a_ring.sum(axis=0), 12))
print("Perron vector:", np.round(perron_vector(a_ring), 6),
      "(uniform: the matrix is doubly stochastic)")
print("|lambda_2| =", round(second_eigenvalue_magnitude(a_ring), 4))

# --- Hastings weights hit any prescribed Perron vector -------------------
target = np.array([0.30, 0.05, 0.05, 0.15, 0.10, 0.10, 0.05, 0.20])
a_hast = build_hastings(geo8, target)
theta = perron_vector(a_hast)
print("\nHastings on the geometric graph")
print("requested theta:", target)
print("recovered theta:", np.round(theta, 12))
print("primitive:", is_primitive(a_hast))
print("|lambda_2| =", round(second_eigenvalue_magnitude(a_hast), 4))

# --- uniform neighborhood averaging is left- but not doubly stochastic ---
a_avg = build_uniform_averaging(geo8)
print("\nuniform averaging: column sums", np.round(a_avg.sum(axis=0), 12))
print("row sums (not 1 in general):   ", np.round(a_avg.sum(axis=1), 3))
print("its Perron vector favors well-connected agents:",
      np.round(perron_vector(a_avg), 3))
