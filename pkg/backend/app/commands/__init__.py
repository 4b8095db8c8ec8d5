"""
Subcommand handlers
Each handler takes its validated config and returns {"rows", "summary", "columns"}.
"""

from app.commands import brownian, density, kolmogorov, kubilius, localized, omega_scan, schedule

COMMANDS = {
    "kolmogorov": kolmogorov.run,
    "localized": localized.run,
    "brownian": brownian.run,
    "omega-scan": omega_scan.run,
    "density": density.run,
    "kubilius": kubilius.run,
    "schedule": schedule.run,
}
