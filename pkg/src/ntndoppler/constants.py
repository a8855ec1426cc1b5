SPEED_OF_LIGHT = 299_792_458.0  # m/s

# Uplink pre-compensation tolerance as a fraction of the subcarrier spacing.
PRECOMP_FRACTION = 0.05
