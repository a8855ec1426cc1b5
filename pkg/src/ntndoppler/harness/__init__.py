from .campaign import (CampaignStats, CellStats, TrialRecord, check_precompensation, run_campaign,
                       run_trial, run_trial_cells)
from .config import CampaignConfig, from_dict, load
from .report import emit_csv, render_csv, summary_table
