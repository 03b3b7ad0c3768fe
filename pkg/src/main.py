import os
import logging

import click
from dotenv import load_dotenv

from commands.scenario import fig_command, run_command, show_command
from commands.verify import verify_command

# Load environment variables before anything reads them
load_dotenv()

# Configure logging
logging.basicConfig(
    level=os.getenv('PCW_LOG_LEVEL', 'INFO').upper(),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


class SimulatorGroup(click.Group):
    """Command group that turns unexpected exceptions into exit status 2"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (click.exceptions.Exit, click.ClickException, click.Abort):
            raise
        except Exception as e:
            logger.exception(f"❌ unexpected error: {e}")
            raise click.exceptions.Exit(2)


@click.group(cls=SimulatorGroup)
@click.option('--log-level', type=click.Choice(LOG_LEVELS, case_sensitive=False),
              envvar='PCW_LOG_LEVEL', default='INFO', show_default=True, help='Logging verbosity')
@click.option('--seedless', is_flag=True, help='Reserved; every run is deterministic')
def cli(log_level, seedless):
    """Parabolic cylinder wave simulator: exact self-accelerating solutions and their evolution"""
    logging.getLogger().setLevel(log_level.upper())
    if seedless:
        raise click.UsageError('--seedless is reserved: every run is already deterministic')


cli.add_command(run_command)
cli.add_command(fig_command)
cli.add_command(show_command)
cli.add_command(verify_command)


if __name__ == '__main__':
    cli()
