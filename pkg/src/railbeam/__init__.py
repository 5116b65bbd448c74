"""Desk-scale simulator for AI-assisted beam- and cell-level mobility in
high-speed-rail mmWave networks.

Subpackages and modules:
    scenario     track geometry, base stations, UE trajectory, slot clock
    codebook     DFT narrow-beam codebooks and measured-subset patterns
    channel      geometric multipath channel, per-beam RSRP, SINR
    measurement  down-sampled / compressed measurements, L3 filtering
    nn           minimal neural-network engine with gradient checking
    predictors   beam- and cell-quality predictors, datasets, metrics
    handover     A3/TTT state machine, RLF timers, handover KPIs
    cli          command-line pipeline (dataset gen, train, simulate, report)
"""

__version__ = "0.1.0"
